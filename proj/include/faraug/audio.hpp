// faraug/audio.hpp

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

#pragma once

// Waveform container, RIFF/WAVE I/O (PCM16 and IEEE float32), band-limited
// resampling and power utilities.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "faraug/error.hpp"

namespace faraug {

/// Working sample rate of every pipeline stage.
inline constexpr int kWorkingRate = 16000;

struct Waveform {
  std::vector<float> samples;
  int sample_rate = kWorkingRate;

  std::size_t size() const noexcept { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  bool operator==(const Waveform&) const = default;
};

inline void validate(const Waveform& w) {
  require(w.sample_rate > 0, ErrorCode::kInvalidArgument,
          "waveform sample_rate must be positive");
  for (float s : w.samples) {
    require(std::isfinite(s), ErrorCode::kInvalidArgument,
            "waveform contains a non-finite sample");
  }
}

enum class WavEncoding { kPcm16, kFloat32 };

struct WriteResult {
  std::size_t clip_count = 0;
};

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

inline std::uint16_t rd_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline std::uint32_t rd_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}
inline void wr_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
inline void wr_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}
inline void wr_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

// Modified Bessel I0 by its power series; terms shrink fast for x <= 20.
inline double bessel_i0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 64 && term > 1e-17 * sum; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
  }
  return sum;
}

inline double kaiser(double x, double beta, double inv_i0_beta) {
  // x in [-1, 1]
  if (x <= -1.0 || x >= 1.0) return 0.0;
  return bessel_i0(beta * std::sqrt(1.0 - x * x)) * inv_i0_beta;
}

inline double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Windowed-sinc interpolation: output n reads input position n * step.
// 32 zero crossings per side at the lower of the two rates (64 taps total),
// Kaiser beta 7, cutoff at 0.93 of the lower Nyquist.
inline std::vector<float> resample_by_step(std::span<const float> in,
                                           double step, std::size_t out_len) {
  constexpr double kHalfTaps = 32.0;
  constexpr double kRolloff = 0.93;
  constexpr double kBeta = 7.0;
  const double scale = std::min(1.0, 1.0 / step);
  const double fc = 0.5 * kRolloff * scale;  // cycles per input sample
  const double half_width = kHalfTaps / scale;
  const auto n_in = static_cast<std::int64_t>(in.size());
  const double inv_i0 = 1.0 / bessel_i0(kBeta);

  std::vector<float> out(out_len);
  for (std::size_t n = 0; n < out_len; ++n) {
    const double t = static_cast<double>(n) * step;
    const auto lo = static_cast<std::int64_t>(std::ceil(t - half_width));
    const auto hi = static_cast<std::int64_t>(std::floor(t + half_width));
    double acc = 0.0;
    for (std::int64_t k = std::max<std::int64_t>(lo, 0);
         k <= std::min<std::int64_t>(hi, n_in - 1); ++k) {
      const double u = t - static_cast<double>(k);
      acc += in[static_cast<std::size_t>(k)] * 2.0 * fc * sinc(2.0 * fc * u) *
             kaiser(u / half_width, kBeta, inv_i0);
    }
    out[n] = static_cast<float>(acc);
  }
  return out;
}

}  // namespace detail

/// Parses RIFF/WAVE bytes (PCM16 or IEEE float32, plain or extensible
/// format). Multi-channel audio is downmixed by channel mean.
inline Waveform decode_wav(std::span<const std::uint8_t> bytes) {
  using detail::rd_u16;
  using detail::rd_u32;
  const std::uint8_t* p = bytes.data();
  const std::size_t n = bytes.size();
  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 ||
      std::memcmp(p + 8, "WAVE", 4) != 0) {
    fail(ErrorCode::kMalformedHeader, "not a RIFF/WAVE container");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= n) {
    const std::uint8_t* chunk = p + pos;
    const std::uint32_t len = rd_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16 || body + len > n)
        fail(ErrorCode::kMalformedHeader, "truncated fmt chunk");
      format = rd_u16(p + body);
      channels = rd_u16(p + body + 2);
      rate = rd_u32(p + body + 4);
      bits = rd_u16(p + body + 14);
      if (format == 0xFFFE) {
        if (len < 40)
          fail(ErrorCode::kMalformedHeader, "truncated extensible fmt chunk");
        format = rd_u16(p + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (body + len > n)
        fail(ErrorCode::kMalformedHeader,
             "data chunk declares " + std::to_string(len) +
                 " bytes but only " + std::to_string(n - body) + " remain");
      data = p + body;
      data_len = len;
      break;
    }
    pos = body + len + (len & 1u);
  }
  if (!have_fmt) fail(ErrorCode::kMalformedHeader, "missing fmt chunk");
  if (data == nullptr) fail(ErrorCode::kMalformedHeader, "missing data chunk");
  if (channels == 0 || rate == 0)
    fail(ErrorCode::kMalformedHeader, "zero channels or sample rate");

  const bool pcm16 = format == 1 && bits == 16;
  const bool f32 = format == 3 && bits == 32;
  if (!pcm16 && !f32) {
    fail(ErrorCode::kUnsupportedEncoding,
         "unsupported encoding: format tag " + std::to_string(format) + ", " +
             std::to_string(bits) + " bits");
  }

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const std::size_t frames = data_len / frame_bytes;
  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  w.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const std::uint8_t* s = data + i * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        acc += static_cast<std::int16_t>(rd_u16(s)) / 32768.0;
      } else {
        float v;
        std::memcpy(&v, s, 4);
        acc += v;
      }
    }
    w.samples[i] = channels == 1 ? static_cast<float>(acc)
                                 : static_cast<float>(acc / channels);
  }
  validate(w);
  return w;
}

inline Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kFileNotFound, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

/// Serializes to RIFF/WAVE bytes; samples outside [-1, 1] are clipped and
/// counted.
inline std::vector<std::uint8_t> encode_wav(const Waveform& w,
                                            WavEncoding enc,
                                            WriteResult* result = nullptr) {
  using detail::wr_tag;
  using detail::wr_u16;
  using detail::wr_u32;
  validate(w);
  const bool pcm16 = enc == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm16 ? 16 : 32;
  const auto data_len =
      static_cast<std::uint32_t>(w.samples.size() * (bits / 8));

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_len);
  wr_tag(out, "RIFF");
  wr_u32(out, 36 + data_len);
  wr_tag(out, "WAVE");
  wr_tag(out, "fmt ");
  wr_u32(out, 16);
  wr_u16(out, pcm16 ? 1 : 3);
  wr_u16(out, 1);
  wr_u32(out, static_cast<std::uint32_t>(w.sample_rate));
  wr_u32(out, static_cast<std::uint32_t>(w.sample_rate) * (bits / 8));
  wr_u16(out, bits / 8);
  wr_u16(out, bits);
  wr_tag(out, "data");
  wr_u32(out, data_len);

  std::size_t clipped = 0;
  for (float s : w.samples) {
    if (s > 1.0f || s < -1.0f) {
      ++clipped;
      s = std::clamp(s, -1.0f, 1.0f);
    }
    if (pcm16) {
      const long q = std::clamp(std::lround(s * 32768.0), -32768L, 32767L);
      wr_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else {
      wr_u32(out, std::bit_cast<std::uint32_t>(s));
    }
  }
  if (result) result->clip_count = clipped;
  return out;
}

inline WriteResult write_wav(const Waveform& w,
                             const std::filesystem::path& path,
                             WavEncoding enc = WavEncoding::kFloat32) {
  WriteResult result;
  const auto bytes = encode_wav(w, enc, &result);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
  return result;
}

/// Output length is round(len * target_rate / source_rate).
inline Waveform resample(const Waveform& w, int target_rate) {
  require(target_rate > 0, ErrorCode::kInvalidArgument,
          "target_rate must be positive");
  validate(w);
  if (target_rate == w.sample_rate) return w;
  const auto len = static_cast<std::uint64_t>(w.samples.size());
  const auto src = static_cast<std::uint64_t>(w.sample_rate);
  const auto tgt = static_cast<std::uint64_t>(target_rate);
  const std::size_t out_len = (len * tgt + src / 2) / src;
  Waveform out;
  out.sample_rate = target_rate;
  out.samples = detail::resample_by_step(
      w.samples, static_cast<double>(src) / static_cast<double>(tgt), out_len);
  return out;
}

/// Reads a WAV file and brings it to the working rate.
inline Waveform load_audio(const std::filesystem::path& path,
                           int rate = kWorkingRate) {
  return resample(read_wav(path), rate);
}

/// Mean of squared samples.
inline double rms_power(std::span<const float> samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (float s : samples) acc += static_cast<double>(s) * s;
  return acc / static_cast<double>(samples.size());
}

inline double rms_power(const Waveform& w) { return rms_power(w.samples); }

inline float peak_abs(std::span<const float> samples) {
  float peak = 0.0f;
  for (float s : samples) peak = std::max(peak, std::fabs(s));
  return peak;
}

}  // namespace faraug
