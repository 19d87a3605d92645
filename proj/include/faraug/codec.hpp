// faraug/codec.hpp

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

// Factorized speech representation (prosody, content, speaker, residual),
// the backend interface, speaker substitution and the FSPC1 file format.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "faraug/audio.hpp"
#include "faraug/error.hpp"
#include "faraug/matrix.hpp"

namespace faraug {

struct CodecDims {
  std::size_t prosody = 0;
  std::size_t content = 0;
  std::size_t speaker = 0;
  std::size_t residual = 0;
  bool operator==(const CodecDims&) const = default;
  std::size_t total() const { return prosody + content + speaker + residual; }
};

inline std::string to_string(const CodecDims& d) {
  std::ostringstream os;
  os << "(" << d.prosody << ", " << d.content << ", " << d.speaker << ", "
     << d.residual << ")";
  return os.str();
}

struct FactorizedSpeech {
  MatrixF prosody;   // T x D_p
  MatrixF content;   // T x D_c
  std::vector<float> speaker;  // D_s, unit norm
  MatrixF residual;  // T x D_r
  double frame_shift_s = 0.010;
  int sample_rate = kWorkingRate;
  std::string backend_id;
  // Backend-private bookkeeping needed for synthesis (opaque to callers).
  std::vector<float> detail;

  std::size_t num_frames() const { return prosody.rows(); }
  CodecDims dims() const {
    return {prosody.cols(), content.cols(), speaker.size(), residual.cols()};
  }
  bool operator==(const FactorizedSpeech&) const = default;
};

inline double l2_norm(std::span<const float> v) {
  double acc = 0.0;
  for (float x : v) acc += static_cast<double>(x) * x;
  return std::sqrt(acc);
}

inline void validate(const FactorizedSpeech& f) {
  const std::size_t T = f.prosody.rows();
  require(f.content.rows() == T && f.residual.rows() == T,
          ErrorCode::kShapeMismatch, "factorized blocks disagree on T");
  auto finite = [](std::span<const float> v) {
    for (float x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  require(finite(f.prosody.data()) && finite(f.content.data()) &&
              finite(f.residual.data()) && finite(f.speaker) &&
              finite(f.detail),
          ErrorCode::kInvalidArgument, "non-finite value in factorized speech");
  require(std::fabs(l2_norm(f.speaker) - 1.0) <= 1e-6,
          ErrorCode::kInvalidArgument, "speaker vector is not unit norm");
}

class CodecBackend {
 public:
  virtual ~CodecBackend() = default;
  virtual std::string id() const = 0;
  virtual CodecDims dims() const = 0;
  virtual int sample_rate() const = 0;
  virtual FactorizedSpeech disentangle(const Waveform& x) const = 0;
  virtual Waveform synthesize(const FactorizedSpeech& f) const = 0;
};

inline FactorizedSpeech disentangle(const CodecBackend& backend,
                                    const Waveform& x) {
  return backend.disentangle(x);
}

inline Waveform synthesize(const CodecBackend& backend,
                           const FactorizedSpeech& f) {
  require(f.dims() == backend.dims(), ErrorCode::kShapeMismatch,
          "factorized dims " + to_string(f.dims()) + " do not match backend " +
              backend.id() + " dims " + to_string(backend.dims()));
  return backend.synthesize(f);
}

/// Replaces the speaker vector; the other blocks are copied untouched.
/// A target already of unit norm (within 1e-6) is kept bit-for-bit.
inline FactorizedSpeech convert_speaker(const FactorizedSpeech& src,
                                        std::span<const float> spk_tgt) {
  require(spk_tgt.size() == src.speaker.size(), ErrorCode::kShapeMismatch,
          "speaker dimension " + std::to_string(spk_tgt.size()) +
              " does not match " + std::to_string(src.speaker.size()));
  const double norm = l2_norm(spk_tgt);
  require(norm > 0.0 && std::isfinite(norm), ErrorCode::kInvalidArgument,
          "target speaker vector has zero or non-finite norm");
  FactorizedSpeech out = src;
  out.speaker.assign(spk_tgt.begin(), spk_tgt.end());
  if (std::fabs(norm - 1.0) > 1e-6)
    for (auto& v : out.speaker) v = static_cast<float>(v / norm);
  return out;
}

inline Waveform voice_convert(const CodecBackend& backend,
                              const Waveform& x_src,
                              const Waveform& x_spk_ref) {
  const FactorizedSpeech src = backend.disentangle(x_src);
  const FactorizedSpeech ref = backend.disentangle(x_spk_ref);
  return synthesize(backend, convert_speaker(src, ref.speaker));
}

// ---------------------------------------------------------------------------
// FSPC1 serialization.  Layout: "FSPC1", u32 T, D_p, D_c, D_s, D_r, f32
// blocks (prosody, content, speaker, residual), u32-length-prefixed
// backend_id.  An optional trailer "FSPX" u32 rate, f64 shift, u32 n,
// f32 detail[n] carries frame metadata and backend bookkeeping.

namespace detail {
inline void put_f32s(std::vector<std::uint8_t>& out, std::span<const float> v) {
  for (float x : v) wr_u32(out, std::bit_cast<std::uint32_t>(x));
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> b) : b_(b) {}
  std::size_t remaining() const { return b_.size() - pos_; }
  void need(std::size_t n) const {
    require(remaining() >= n, ErrorCode::kMalformedHeader,
            "truncated factorized speech record");
  }
  std::uint32_t u32() {
    need(4);
    const auto v = rd_u32(b_.data() + pos_);
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  void f32s(std::span<float> out) {
    need(4 * out.size());
    for (auto& x : out) x = f32();
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};
}  // namespace detail

inline std::vector<std::uint8_t> serialize(const FactorizedSpeech& f) {
  validate(f);
  std::vector<std::uint8_t> out;
  const char magic[] = "FSPC1";
  out.insert(out.end(), magic, magic + 5);
  const CodecDims d = f.dims();
  for (std::size_t v : {f.num_frames(), d.prosody, d.content, d.speaker,
                        d.residual})
    detail::wr_u32(out, static_cast<std::uint32_t>(v));
  detail::put_f32s(out, f.prosody.data());
  detail::put_f32s(out, f.content.data());
  detail::put_f32s(out, f.speaker);
  detail::put_f32s(out, f.residual.data());
  detail::wr_u32(out, static_cast<std::uint32_t>(f.backend_id.size()));
  out.insert(out.end(), f.backend_id.begin(), f.backend_id.end());

  detail::wr_tag(out, "FSPX");
  detail::wr_u32(out, static_cast<std::uint32_t>(f.sample_rate));
  const auto shift_bits = std::bit_cast<std::uint64_t>(f.frame_shift_s);
  detail::wr_u32(out, static_cast<std::uint32_t>(shift_bits));
  detail::wr_u32(out, static_cast<std::uint32_t>(shift_bits >> 32));
  detail::wr_u32(out, static_cast<std::uint32_t>(f.detail.size()));
  detail::put_f32s(out, f.detail);
  return out;
}

inline FactorizedSpeech deserialize_factorized(
    std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  require(r.bytes(5) == "FSPC1", ErrorCode::kMalformedHeader,
          "bad factorized speech magic");
  const std::size_t T = r.u32(), dp = r.u32(), dc = r.u32(), ds = r.u32(),
                    dr = r.u32();
  require(T < (1u << 24) && dp + dc + ds + dr < (1u << 16),
          ErrorCode::kMalformedHeader, "implausible factorized dims");
  FactorizedSpeech f;
  f.prosody = MatrixF(T, dp);
  f.content = MatrixF(T, dc);
  f.speaker.resize(ds);
  f.residual = MatrixF(T, dr);
  r.f32s(f.prosody.data());
  r.f32s(f.content.data());
  r.f32s(f.speaker);
  r.f32s(f.residual.data());
  f.backend_id = r.bytes(r.u32());
  if (r.remaining() > 0) {
    require(r.bytes(4) == "FSPX", ErrorCode::kMalformedHeader,
            "unknown trailer in factorized speech record");
    f.sample_rate = static_cast<int>(r.u32());
    const std::uint64_t lo = r.u32(), hi = r.u32();
    f.frame_shift_s = std::bit_cast<double>(lo | (hi << 32));
    f.detail.resize(r.u32());
    r.f32s(f.detail);
    require(r.remaining() == 0, ErrorCode::kMalformedHeader,
            "trailing bytes after factorized speech record");
  }
  validate(f);
  return f;
}

inline void write_factorized(const FactorizedSpeech& f,
                             const std::filesystem::path& path) {
  const auto bytes = serialize(f);
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::kIo,
          "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorCode::kIo,
          "write failed: " + path.string());
}

inline FactorizedSpeech read_factorized(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kFileNotFound,
          "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return deserialize_factorized(bytes);
}

}  // namespace faraug
