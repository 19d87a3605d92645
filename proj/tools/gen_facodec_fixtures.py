#!/usr/bin/env python3
# Copyright 2026  The faraug Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

# Writes the golden request/response pairs replayed by the mock codec
# service in the test suite.  Output is deterministic.
#
#   tools/gen_facodec_fixtures.py tests/fixtures/facodec

import base64
import json
import pathlib
import struct
import sys

import numpy as np

RATE = 16000
HOP = 160
DIMS = {"prosody": 4, "content": 12, "speaker": 6, "residual": 10}


def wav_f32(x):
    x = np.clip(np.asarray(x, dtype=np.float32), -1.0, 1.0)
    data = x.astype("<f4").tobytes()
    hdr = b"RIFF" + struct.pack("<I", 36 + len(data)) + b"WAVE"
    hdr += b"fmt " + struct.pack("<IHHIIHH", 16, 3, 1, RATE, RATE * 4, 4, 32)
    hdr += b"data" + struct.pack("<I", len(data))
    return hdr + data


def b64(a):
    return base64.b64encode(np.asarray(a, dtype="<f4").tobytes()).decode("ascii")


def factorize(x, rng):
    # Stand-in model: any fixed function of the input will do.
    T = len(x) // HOP
    frames = x[: T * HOP].reshape(T, HOP)
    e = np.log(np.mean(frames.astype(np.float64) ** 2, axis=1) + 1e-8)
    blocks = {}
    for name in ("prosody", "content", "residual"):
        w = rng.standard_normal(DIMS[name])
        blocks[name] = np.outer(e, w) * 0.1
    s = rng.standard_normal(DIMS["speaker"]) + np.mean(e)
    blocks["speaker"] = s / np.linalg.norm(s)
    return T, blocks


def to_json(T, b):
    return {
        "T": T,
        "dims": DIMS,
        "prosody": b64(b["prosody"]),
        "content": b64(b["content"]),
        "speaker": b64(b["speaker"]),
        "residual": b64(b["residual"]),
    }


def render(T, b):
    t = np.arange(T * HOP) / RATE
    f0 = 150.0 + 100.0 * abs(float(b["speaker"][0]))
    env = np.repeat(np.exp(b["prosody"][:, 0]), HOP)
    return 0.3 * np.sin(2 * np.pi * f0 * t) * np.clip(env, 0.0, 1.0)


def main(out):
    out = pathlib.Path(out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20260415)
    t = np.arange(4000) / RATE
    src = 0.4 * np.sin(2 * np.pi * 220 * t) * np.hanning(4000) + 0.01 * rng.standard_normal(4000)
    ref = 0.2 * np.sin(2 * np.pi * 330 * t) + 0.02 * rng.standard_normal(4000)

    files = {}
    files["health.json"] = json.dumps({
        "backend_id": "facodec-golden",
        "dims": DIMS,
        "sample_rate": RATE,
        "revision": "golden-1",
        "deterministic": True,
    }, indent=2).encode()

    src_bytes, ref_bytes = wav_f32(src), wav_f32(ref)
    # The model sees exactly what was sent.
    src32 = np.frombuffer(src_bytes[44:], dtype="<f4")
    ref32 = np.frombuffer(ref_bytes[44:], dtype="<f4")
    Ts, bs = factorize(src32, np.random.default_rng(1))
    Tr, br = factorize(ref32, np.random.default_rng(2))
    for b in (bs, br):
        for k in b:
            b[k] = b[k].astype(np.float32)
    conv = dict(bs, speaker=br["speaker"])

    files["src.wav"] = src_bytes
    files["ref.wav"] = ref_bytes
    files["disentangle_src.json"] = json.dumps(to_json(Ts, bs), indent=2).encode()
    files["disentangle_ref.json"] = json.dumps(to_json(Tr, br), indent=2).encode()
    files["synthesize_self.json"] = files["disentangle_src.json"]
    files["synthesize_self.wav"] = wav_f32(render(Ts, bs))
    files["synthesize_conv.json"] = json.dumps(to_json(Ts, conv), indent=2).encode()
    files["synthesize_conv.wav"] = wav_f32(render(Ts, conv))
    # convert(src, ref) is the three-call composition.
    files["convert_src_ref.wav"] = files["synthesize_conv.wav"]

    for name, data in sorted(files.items()):
        (out / name).write_bytes(data)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/facodec")
