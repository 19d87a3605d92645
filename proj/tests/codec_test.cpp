// tests/codec_test.cpp

// Copyright 2026  The faraug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "faraug/toy_codec.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "test_signals.hpp"

namespace faraug {
namespace {

using testing::white_noise;

const ToyCodec& codec() {
  static const ToyCodec c;
  return c;
}

double vec_dist(const std::vector<float>& a, const std::vector<float>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double rel_rms(const Waveform& out, const Waveform& ref) {
  double err = 0.0, pow = 0.0;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const double d = static_cast<double>(out.samples[i]) - ref.samples[i];
    err += d * d;
    pow += static_cast<double>(ref.samples[i]) * ref.samples[i];
  }
  return std::sqrt(err / pow);
}

std::vector<std::uint8_t> block_bytes(const MatrixF& m) {
  std::vector<std::uint8_t> b(m.data().size() * sizeof(float));
  std::memcpy(b.data(), m.data().data(), b.size());
  return b;
}

TEST(ToyRotation, OrthonormalWithUniformFirstRow) {
  const MatrixD& q = codec().rotation();
  for (std::size_t i = 0; i < 80; ++i) {
    EXPECT_NEAR(q(0, i), 1.0 / std::sqrt(80.0), 1e-14);
    for (std::size_t j = 0; j < 80; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < 80; ++k) dot += q(i, k) * q(j, k);
      EXPECT_NEAR(dot, i == j ? 1.0 : 0.0, 1e-12);
    }
  }
  EXPECT_EQ(seeded_rotation(80, kToyCodecSeed), q);
}

TEST(ToyDisentangle, ShapeOneSecond) {
  const FactorizedSpeech f = codec().disentangle(white_noise(16000, 0.1, 1));
  EXPECT_EQ(f.num_frames(), 98u);
  EXPECT_EQ(f.dims(), (CodecDims{8, 32, 16, 24}));
  EXPECT_EQ(f.content.rows(), 98u);
  EXPECT_EQ(f.residual.rows(), 98u);
  EXPECT_NEAR(l2_norm(f.speaker), 1.0, 1e-6);
  EXPECT_EQ(f.backend_id, "toy-subspace-v1");
}

TEST(ToyDisentangle, Deterministic) {
  const Waveform x = testing::burst_train(3, 1.2);
  EXPECT_EQ(codec().disentangle(x), codec().disentangle(x));
}

TEST(ToyDisentangle, SpeakerIsGainInvariant) {
  const Waveform x = testing::burst_train(4, 1.5, 0.25, 0.3, 0.4);
  const FactorizedSpeech base = codec().disentangle(x);
  for (double alpha : {0.5, 2.0}) {
    Waveform scaled = x;
    for (auto& s : scaled.samples) s = static_cast<float>(s * alpha);
    EXPECT_LE(vec_dist(codec().disentangle(scaled).speaker, base.speaker), 1e-6);
  }
}

TEST(ToyDisentangle, SpeakerIsMeanOfRotatedFrames) {
  // Independent recomputation from the public log-mel and rotation.
  const Waveform x = white_noise(8000, 0.1, 12);
  const FactorizedSpeech f = codec().disentangle(x);
  const MelSpectrogram mel = log_mel(x);
  const MatrixD& q = codec().rotation();
  std::vector<double> mu(16, 0.0);
  for (std::size_t t = 0; t < mel.frames.rows(); ++t)
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t k = 0; k < 80; ++k)
        mu[i] += q(40 + i, k) * mel.frames(t, k) / mel.frames.rows();
  double n = 0.0;
  for (double v : mu) n += v * v;
  n = std::sqrt(n);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(f.speaker[i], mu[i] / n, 1e-6);
  for (std::size_t k = 0; k < 8; ++k) {
    double z = 0.0;
    for (std::size_t j = 0; j < 80; ++j) z += q(k, j) * mel.frames(5, j);
    EXPECT_NEAR(f.prosody(5, k), z, 1e-4);
  }
}

TEST(ToyDisentangle, ErrorCases) {
  Waveform silent;
  silent.samples.assign(16000, 0.0f);
  try {
    codec().disentangle(silent);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroPower);
  }
  try {
    codec().disentangle(white_noise(300, 0.1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooShort);
  }
}

TEST(ConvertSpeaker, ChangesOnlySpeakerBlock) {
  const FactorizedSpeech far = codec().disentangle(testing::burst_train(5, 1.0));
  const FactorizedSpeech near = codec().disentangle(white_noise(12000, 0.1, 6));
  const FactorizedSpeech out = convert_speaker(far, near.speaker);
  EXPECT_EQ(block_bytes(out.prosody), block_bytes(far.prosody));
  EXPECT_EQ(block_bytes(out.content), block_bytes(far.content));
  EXPECT_EQ(block_bytes(out.residual), block_bytes(far.residual));
  EXPECT_EQ(out.speaker, near.speaker);
  EXPECT_EQ(out.detail, far.detail);
}

TEST(ConvertSpeaker, IdentityAndOverwrite) {
  const FactorizedSpeech f = codec().disentangle(testing::burst_train(7, 1.0));
  const FactorizedSpeech s1 = codec().disentangle(white_noise(9000, 0.1, 8));
  const FactorizedSpeech s2 = codec().disentangle(testing::burst_train(9, 1.0));
  EXPECT_EQ(convert_speaker(f, f.speaker), f);
  EXPECT_EQ(convert_speaker(convert_speaker(f, s1.speaker), s2.speaker),
            convert_speaker(f, s2.speaker));
}

TEST(ConvertSpeaker, NormalizesAndChecksDims) {
  const FactorizedSpeech f = codec().disentangle(white_noise(8000, 0.1, 2));
  std::vector<float> raw(16, 0.0f);
  raw[3] = 4.0f;
  const FactorizedSpeech out = convert_speaker(f, raw);
  EXPECT_EQ(out.speaker[3], 1.0f);
  EXPECT_THROW(convert_speaker(f, std::vector<float>(15, 0.25f)), Error);
  EXPECT_THROW(convert_speaker(f, std::vector<float>(16, 0.0f)), Error);
}

TEST(ToySynthesize, ExactForTimeConstantSpeakerCoordinates) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Waveform x = testing::frame_periodic_fixture(seed);
    const Waveform y = synthesize(codec(), codec().disentangle(x));
    ASSERT_EQ(y.samples.size(), 97u * 160u + 400u);
    EXPECT_LE(testing::rms_diff(y.samples, x.samples, y.samples.size()), 1e-6);
  }
}

TEST(ToySynthesize, StationaryRoundTripWithinFivePercent) {
  for (std::uint64_t seed = 10; seed < 14; ++seed) {
    const Waveform x = testing::multitone_fixture(seed);
    const Waveform y = synthesize(codec(), codec().disentangle(x));
    EXPECT_LE(rel_rms(y, x), 0.05) << "seed " << seed;
  }
}

TEST(ToySynthesize, ZeroEmbeddingsGiveSilence) {
  FactorizedSpeech f;
  f.prosody = MatrixF(50, 8);
  f.content = MatrixF(50, 32);
  f.speaker.assign(16, 0.0f);
  f.residual = MatrixF(50, 24);
  const Waveform y = synthesize(codec(), f);
  ASSERT_EQ(y.samples.size(), 49u * 160u + 400u);
  for (float v : y.samples) EXPECT_EQ(v, 0.0f);
}

TEST(ToySynthesize, DimsMismatchAndMissingDetail) {
  FactorizedSpeech f = codec().disentangle(white_noise(8000, 0.1, 3));
  FactorizedSpeech bad = f;
  bad.speaker.resize(15);
  try {
    synthesize(codec(), bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
  f.detail.clear();
  try {
    synthesize(codec(), f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackendError);
  }
}

TEST(VoiceConvert, SelfConversionIsPlainResynthesis) {
  const Waveform x = testing::burst_train(21, 1.3, 0.25, 0.3, 0.3);
  EXPECT_EQ(voice_convert(codec(), x, x),
            synthesize(codec(), codec().disentangle(x)));
}

TEST(VoiceConvert, ReExtractedSpeakerMatchesReference) {
  // Broadband sources: a lone sinusoid feeds two adjacent mel filters in a
  // fixed ratio, so very sparse spectra cannot reach every direction.
  const Waveform reverberant = testing::mix(
      testing::convolve_truncated(testing::burst_train(30, 1.5, 0.3, 0.2, 0.5),
                                  testing::synthetic_rir(0.6, 30)),
      white_noise(24000, 0.003, 33));
  const Waveform sources[] = {reverberant,
                              testing::burst_train(31, 1.5, 0.25, 0.3, -0.5),
                              white_noise(20000, 0.08, 32)};
  const Waveform refs[] = {testing::burst_train(40, 2.0, 0.2, 0.4, 0.7),
                           white_noise(16000, 0.1, 41),
                           testing::multitone_fixture(42)};
  for (const auto& src : sources)
    for (const auto& ref : refs) {
      const Waveform out = voice_convert(codec(), src, ref);
      EXPECT_LE(vec_dist(codec().disentangle(out).speaker,
                         codec().disentangle(ref).speaker),
                1e-6);
    }
}

TEST(VoiceConvert, ProsodyFollowsSource) {
  // The converted utterance keeps the source's frame-level prosody far
  // more closely than that of an unrelated utterance.
  const Waveform src = testing::burst_train(50, 2.0, 0.25, 0.3, 0.2);
  const Waveform ref = white_noise(32000, 0.1, 51);
  const FactorizedSpeech fs = codec().disentangle(src);
  const FactorizedSpeech fr = codec().disentangle(ref);
  const FactorizedSpeech fo = codec().disentangle(voice_convert(codec(), src, ref));
  auto dist = [](const MatrixF& a, const MatrixF& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
      const double d = static_cast<double>(a.data()[i]) - b.data()[i];
      acc += d * d;
    }
    return std::sqrt(acc);
  };
  EXPECT_LT(dist(fo.prosody, fs.prosody), 0.5 * dist(fr.prosody, fs.prosody));
}

TEST(Fspc1, RoundTripAndLayout) {
  const FactorizedSpeech f = codec().disentangle(white_noise(4000, 0.1, 4));
  const auto bytes = serialize(f);
  ASSERT_GE(bytes.size(), 25u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 5), "FSPC1");
  auto u32_at = [&](std::size_t off) {
    return static_cast<std::uint32_t>(bytes[off]) |
           static_cast<std::uint32_t>(bytes[off + 1]) << 8 |
           static_cast<std::uint32_t>(bytes[off + 2]) << 16 |
           static_cast<std::uint32_t>(bytes[off + 3]) << 24;
  };
  const std::uint32_t T = 1 + (4000 - 400) / 160;
  EXPECT_EQ(u32_at(5), T);
  EXPECT_EQ(u32_at(9), 8u);
  EXPECT_EQ(u32_at(13), 32u);
  EXPECT_EQ(u32_at(17), 16u);
  EXPECT_EQ(u32_at(21), 24u);
  float first;
  std::memcpy(&first, &bytes[25], 4);
  EXPECT_EQ(first, f.prosody(0, 0));
  const std::size_t id_at = 25 + 4 * (T * 8 + T * 32 + 16 + T * 24);
  EXPECT_EQ(u32_at(id_at), f.backend_id.size());
  EXPECT_EQ(std::string(bytes.begin() + id_at + 4,
                        bytes.begin() + id_at + 4 + f.backend_id.size()),
            f.backend_id);
  EXPECT_EQ(deserialize_factorized(bytes), f);

  // A record without the trailer is still readable.
  std::vector<std::uint8_t> core(bytes.begin(),
                                 bytes.begin() + id_at + 4 + f.backend_id.size());
  const FactorizedSpeech g = deserialize_factorized(core);
  EXPECT_EQ(g.prosody, f.prosody);
  EXPECT_TRUE(g.detail.empty());

  core.resize(core.size() - 3);
  try {
    deserialize_factorized(core);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedHeader);
  }
}

TEST(Fspc1, FileRoundTripSynthesizesIdentically) {
  const auto dir = testing::temp_dir("fspc1");
  const FactorizedSpeech f = codec().disentangle(testing::burst_train(60, 1.0));
  write_factorized(f, dir / "a.fspc");
  const FactorizedSpeech g = read_factorized(dir / "a.fspc");
  EXPECT_EQ(g, f);
  EXPECT_EQ(synthesize(codec(), g), synthesize(codec(), f));
}

}  // namespace
}  // namespace faraug
