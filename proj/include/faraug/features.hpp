// faraug/features.hpp

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

// STFT framing (25 ms window, 10 ms shift, no centering), its weighted
// overlap-add inverse, and the 80-band log-Mel filterbank.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "faraug/audio.hpp"
#include "faraug/error.hpp"
#include "faraug/fft.hpp"
#include "faraug/matrix.hpp"

namespace faraug {

inline constexpr int kNumMelBins = 80;
inline constexpr double kMelLowHz = 20.0;
inline constexpr double kMelHighHz = 7600.0;
inline constexpr double kLogFloor = 1e-10;

struct FrameConfig {
  double frame_len_s = 0.025;
  double frame_shift_s = 0.010;
};

struct FrameGeometry {
  std::size_t win_len = 0;
  std::size_t hop_len = 0;
  std::size_t fft_size = 0;

  std::size_t num_frames(std::size_t num_samples) const {
    if (num_samples < win_len) return 0;
    return 1 + (num_samples - win_len) / hop_len;
  }
  /// Samples covered by `frames` frames.
  std::size_t covered_samples(std::size_t frames) const {
    return frames == 0 ? 0 : frames * hop_len + (win_len - hop_len);
  }
};

inline FrameGeometry frame_geometry(int sample_rate,
                                    const FrameConfig& cfg = {}) {
  FrameGeometry g;
  g.win_len = static_cast<std::size_t>(std::lround(cfg.frame_len_s * sample_rate));
  g.hop_len = static_cast<std::size_t>(std::lround(cfg.frame_shift_s * sample_rate));
  require(g.win_len >= 2 && g.hop_len >= 1 && g.hop_len <= g.win_len,
          ErrorCode::kInvalidArgument, "invalid frame configuration");
  g.fft_size = std::bit_ceil(g.win_len);
  return g;
}

/// Hann window evaluated at half-sample offsets, so no tap is zero and
/// overlap-add inversion is defined at every covered sample.
inline std::vector<double> analysis_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                (static_cast<double>(i) + 0.5) /
                                static_cast<double>(n));
  }
  return w;
}

struct Spectrogram {
  Matrix<std::complex<double>> frames;  // T x (fft_size / 2 + 1)
  double frame_shift_s = 0.010;
  double frame_len_s = 0.025;
  int sample_rate = kWorkingRate;
};

inline Spectrogram stft(const Waveform& w, const FrameConfig& cfg = {}) {
  validate(w);
  const FrameGeometry g = frame_geometry(w.sample_rate, cfg);
  require(w.samples.size() >= g.win_len, ErrorCode::kTooShort,
          "waveform of " + std::to_string(w.samples.size()) +
              " samples is shorter than one " + std::to_string(g.win_len) +
              "-sample frame");
  const std::size_t T = g.num_frames(w.samples.size());
  const RealFft& fft = RealFft::get(g.fft_size);
  const auto window = analysis_window(g.win_len);

  Spectrogram spec;
  spec.frame_len_s = cfg.frame_len_s;
  spec.frame_shift_s = cfg.frame_shift_s;
  spec.sample_rate = w.sample_rate;
  spec.frames = Matrix<std::complex<double>>(T, fft.bins());
  std::vector<double> buf(g.fft_size);
  for (std::size_t t = 0; t < T; ++t) {
    std::fill(buf.begin(), buf.end(), 0.0);
    const float* src = w.samples.data() + t * g.hop_len;
    for (std::size_t i = 0; i < g.win_len; ++i) buf[i] = src[i] * window[i];
    fft.forward(buf, spec.frames.row(t));
  }
  return spec;
}

/// Weighted overlap-add in double precision.  The squared-window sum is
/// floored at min_norm, which tames the tapered edges for modified spectra.
inline std::vector<double> istft_samples(const Spectrogram& spec,
                                         double min_norm = 0.0) {
  const FrameGeometry g = frame_geometry(
      spec.sample_rate, {spec.frame_len_s, spec.frame_shift_s});
  const std::size_t T = spec.frames.rows();
  require(spec.frames.cols() == g.fft_size / 2 + 1, ErrorCode::kShapeMismatch,
          "spectrogram bin count does not match frame geometry");
  const RealFft& fft = RealFft::get(g.fft_size);
  const auto window = analysis_window(g.win_len);
  const std::size_t len = g.covered_samples(T);

  std::vector<double> acc(len, 0.0), norm(len, 0.0), buf(g.fft_size);
  const double inv_n = 1.0 / static_cast<double>(g.fft_size);
  for (std::size_t t = 0; t < T; ++t) {
    fft.inverse(spec.frames.row(t), buf);
    const std::size_t off = t * g.hop_len;
    for (std::size_t i = 0; i < g.win_len; ++i) {
      acc[off + i] += buf[i] * inv_n * window[i];
      norm[off + i] += window[i] * window[i];
    }
  }
  for (std::size_t i = 0; i < len; ++i) acc[i] /= std::max(norm[i], min_norm);
  return acc;
}

/// Inverse of stft(); returns covered_samples(T) samples. Exact (to
/// rounding) for any unmodified STFT.
inline Waveform istft(const Spectrogram& spec) {
  const auto samples = istft_samples(spec);
  Waveform out;
  out.sample_rate = spec.sample_rate;
  out.samples.assign(samples.begin(), samples.end());
  return out;
}

inline MatrixD power_spectrum(const Spectrogram& spec) {
  MatrixD p(spec.frames.rows(), spec.frames.cols());
  for (std::size_t i = 0; i < p.data().size(); ++i)
    p.data()[i] = std::norm(spec.frames.data()[i]);
  return p;
}

inline double hz_to_mel(double hz) {
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}
inline double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

/// Triangular filters whose peaks are equally spaced on the mel scale from
/// 20 Hz to 7600 Hz; adjacent triangles meet at each other's peaks so the
/// weights at any bin inside that range sum to one.
inline MatrixD mel_filterbank(int sample_rate, std::size_t fft_size,
                              int num_bins = kNumMelBins,
                              double low_hz = kMelLowHz,
                              double high_hz = kMelHighHz) {
  const std::size_t F = fft_size / 2 + 1;
  const double mlo = hz_to_mel(low_hz);
  const double mhi = hz_to_mel(high_hz);
  const double step = (mhi - mlo) / (num_bins - 1);
  std::vector<double> centers(static_cast<std::size_t>(num_bins) + 2);
  for (int k = -1; k <= num_bins; ++k)
    centers[static_cast<std::size_t>(k + 1)] = mel_to_hz(mlo + k * step);

  MatrixD fb(static_cast<std::size_t>(num_bins), F, 0.0);
  const double bin_hz = static_cast<double>(sample_rate) / fft_size;
  for (int k = 0; k < num_bins; ++k) {
    const double left = centers[k], mid = centers[k + 1],
                 right = centers[k + 2];
    for (std::size_t f = 0; f < F; ++f) {
      const double hz = f * bin_hz;
      double wgt = 0.0;
      if (hz > left && hz <= mid) {
        wgt = (hz - left) / (mid - left);
      } else if (hz > mid && hz < right) {
        wgt = (right - hz) / (right - mid);
      }
      fb(static_cast<std::size_t>(k), f) = wgt;
    }
  }
  return fb;
}

struct MelSpectrogram {
  MatrixD frames;  // T x 80, natural-log energies
  double frame_shift_s = 0.010;
  double frame_len_s = 0.025;
  int sample_rate = kWorkingRate;
};

/// Natural log of filterbank energies with floor 1e-10.
inline MatrixD log_mel_from_power(const MatrixD& power, const MatrixD& fb) {
  require(power.cols() == fb.cols(), ErrorCode::kShapeMismatch,
          "power spectrum and filterbank disagree on bin count");
  // Each triangle's nonzero span; zero weights add nothing to the sum.
  std::vector<std::pair<std::size_t, std::size_t>> span(fb.rows(), {0, 0});
  for (std::size_t k = 0; k < fb.rows(); ++k) {
    const auto wk = fb.row(k);
    std::size_t lo = 0, hi = wk.size();
    while (lo < hi && wk[lo] == 0.0) ++lo;
    while (hi > lo && wk[hi - 1] == 0.0) --hi;
    span[k] = {lo, hi};
  }
  MatrixD out(power.rows(), fb.rows());
  for (std::size_t t = 0; t < power.rows(); ++t) {
    const auto p = power.row(t);
    for (std::size_t k = 0; k < fb.rows(); ++k) {
      const auto wk = fb.row(k);
      double e = 0.0;
      for (std::size_t f = span[k].first; f < span[k].second; ++f) e += wk[f] * p[f];
      out(t, k) = std::log(std::max(e, kLogFloor));
    }
  }
  return out;
}

/// Shared filterbank for the working geometry.
inline const MatrixD& default_filterbank(int sample_rate) {
  static std::mutex m;
  static std::map<int, MatrixD> cache;
  std::lock_guard lock(m);
  auto it = cache.find(sample_rate);
  if (it == cache.end()) {
    const auto g = frame_geometry(sample_rate);
    it = cache.emplace(sample_rate, mel_filterbank(sample_rate, g.fft_size))
             .first;
  }
  return it->second;
}

/// Subtracts each bin's time-mean.
inline void apply_mean_norm(MelSpectrogram& mel) {
  const std::size_t T = mel.frames.rows(), D = mel.frames.cols();
  if (T == 0) return;
  for (std::size_t k = 0; k < D; ++k) {
    double mean = 0.0;
    for (std::size_t t = 0; t < T; ++t) mean += mel.frames(t, k);
    mean /= static_cast<double>(T);
    for (std::size_t t = 0; t < T; ++t) mel.frames(t, k) -= mean;
  }
}

inline MelSpectrogram log_mel(const Waveform& w, bool mean_norm = false) {
  const Spectrogram spec = stft(w);
  MelSpectrogram mel;
  mel.frames =
      log_mel_from_power(power_spectrum(spec), default_filterbank(w.sample_rate));
  mel.frame_shift_s = spec.frame_shift_s;
  mel.frame_len_s = spec.frame_len_s;
  mel.sample_rate = spec.sample_rate;
  if (mean_norm) apply_mean_norm(mel);
  return mel;
}

// --- Feature dump --------------------------------------------------------
//
// Archive: concatenated records, each
//   "FMEL" | u32 rows | u32 cols | f32 frame_shift_s | f32 frame_len_s |
//   u32 sample_rate | rows*cols f32 (row-major, little-endian)
// Index: one "utt_id offset" line per record.

inline constexpr char kFeatureMagic[4] = {'F', 'M', 'E', 'L'};

inline void write_feature_record(std::ostream& out, const MatrixD& m,
                                 double frame_shift_s, double frame_len_s,
                                 int sample_rate) {
  auto put_u32 = [&](std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
  };
  auto put_f32 = [&](float v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
  };
  out.write(kFeatureMagic, 4);
  put_u32(static_cast<std::uint32_t>(m.rows()));
  put_u32(static_cast<std::uint32_t>(m.cols()));
  put_f32(static_cast<float>(frame_shift_s));
  put_f32(static_cast<float>(frame_len_s));
  put_u32(static_cast<std::uint32_t>(sample_rate));
  for (double v : m.data()) put_f32(static_cast<float>(v));
}

class FeatureWriter {
 public:
  FeatureWriter(const std::filesystem::path& archive,
                const std::filesystem::path& index)
      : archive_(archive, std::ios::binary | std::ios::trunc),
        index_(index, std::ios::trunc) {
    require(archive_.good(), ErrorCode::kIo,
            "cannot write " + archive.string());
    require(index_.good(), ErrorCode::kIo, "cannot write " + index.string());
  }

  void append(const std::string& utt_id, const MatrixD& m,
              double frame_shift_s = 0.0, double frame_len_s = 0.0,
              int sample_rate = 0) {
    index_ << utt_id << ' ' << static_cast<long long>(archive_.tellp())
           << '\n';
    write_feature_record(archive_, m, frame_shift_s, frame_len_s,
                         sample_rate);
    require(archive_.good() && index_.good(), ErrorCode::kIo,
            "feature archive write failed");
  }

  void append(const std::string& utt_id, const MelSpectrogram& mel) {
    append(utt_id, mel.frames, mel.frame_shift_s, mel.frame_len_s,
           mel.sample_rate);
  }

 private:
  std::ofstream archive_;
  std::ofstream index_;
};

struct FeatureRecord {
  MatrixD values;
  double frame_shift_s = 0.0;
  double frame_len_s = 0.0;
  int sample_rate = 0;
};

inline FeatureRecord read_feature_record(const std::filesystem::path& archive,
                                         std::uint64_t offset) {
  std::ifstream in(archive, std::ios::binary);
  require(in.good(), ErrorCode::kFileNotFound,
          "cannot open " + archive.string());
  in.seekg(static_cast<std::streamoff>(offset));
  char magic[4];
  std::uint32_t rows = 0, cols = 0, rate = 0;
  float shift = 0, len = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&cols), 4);
  in.read(reinterpret_cast<char*>(&shift), 4);
  in.read(reinterpret_cast<char*>(&len), 4);
  in.read(reinterpret_cast<char*>(&rate), 4);
  require(in.good() && std::memcmp(magic, kFeatureMagic, 4) == 0,
          ErrorCode::kMalformedHeader, "bad feature record header");
  FeatureRecord rec;
  rec.values = MatrixD(rows, cols);
  std::vector<float> buf(static_cast<std::size_t>(rows) * cols);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * 4));
  require(in.good(), ErrorCode::kMalformedHeader, "truncated feature record");
  for (std::size_t i = 0; i < buf.size(); ++i) rec.values.data()[i] = buf[i];
  rec.frame_shift_s = shift;
  rec.frame_len_s = len;
  rec.sample_rate = static_cast<int>(rate);
  return rec;
}

inline std::map<std::string, std::uint64_t> read_feature_index(
    const std::filesystem::path& index) {
  std::ifstream in(index);
  require(in.good(), ErrorCode::kFileNotFound,
          "cannot open " + index.string());
  std::map<std::string, std::uint64_t> out;
  std::string id;
  std::uint64_t off;
  while (in >> id >> off) out[id] = off;
  return out;
}

}  // namespace faraug
