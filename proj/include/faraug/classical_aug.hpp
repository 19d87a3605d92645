// faraug/classical_aug.hpp

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

// Baseline augmentations: additive noise at a target SNR, RIR
// reverberation, speed perturbation, SpecAugment masking, FilterAugment
// band weighting and block-shuffle augmentation.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "faraug/audio.hpp"
#include "faraug/error.hpp"
#include "faraug/features.hpp"
#include "faraug/fft.hpp"
#include "faraug/rng.hpp"

namespace faraug {

struct AugConfig {
  std::uint64_t seed = 0;
  double snr_db_lo = 0.0;
  double snr_db_hi = 20.0;
  std::vector<double> speed_factors = {0.9, 1.0, 1.1};
  int spec_time_mask_max = 10;  // frames
  int spec_freq_mask_max = 8;   // mel bins
  double filter_db_lo = -6.0;
  double filter_db_hi = 6.0;
  double shuffle_block_s = 0.5;
};

inline void validate(const AugConfig& cfg) {
  std::ostringstream problems;
  if (!(cfg.snr_db_lo <= cfg.snr_db_hi)) problems << " snr range lo > hi;";
  if (!(cfg.filter_db_lo <= cfg.filter_db_hi) ||
      !std::isfinite(cfg.filter_db_lo) || !std::isfinite(cfg.filter_db_hi))
    problems << " filter range invalid;";
  for (double f : cfg.speed_factors)
    if (!(f > 0.0)) problems << " speed factor " << f << " not positive;";
  if (cfg.spec_time_mask_max < 0) problems << " time mask max negative;";
  if (cfg.spec_freq_mask_max < 0) problems << " freq mask max negative;";
  if (!(cfg.shuffle_block_s > 0.0)) problems << " shuffle block not positive;";
  const std::string msg = problems.str();
  require(msg.empty(), ErrorCode::kConfig, "invalid AugConfig:" + msg);
}

/// Pass as snr_db to leave the speech untouched.
inline constexpr double kSnrClean = std::numeric_limits<double>::infinity();

/// Mixes noise (looped or trimmed to the speech length) at gain
/// g = sqrt(P_speech / (P_noise * 10^(snr_db / 10))).
inline Waveform add_noise_snr(const Waveform& speech, const Waveform& noise,
                              double snr_db) {
  validate(speech);
  validate(noise);
  require(speech.sample_rate == noise.sample_rate,
          ErrorCode::kSampleRateMismatch,
          "speech and noise sample rates differ");
  if (std::isinf(snr_db) && snr_db > 0) return speech;
  require(!noise.samples.empty(), ErrorCode::kZeroPower, "empty noise");

  std::vector<float> fitted(speech.samples.size());
  for (std::size_t i = 0; i < fitted.size(); ++i)
    fitted[i] = noise.samples[i % noise.samples.size()];
  const double ps = rms_power(speech);
  const double pn = rms_power(fitted);
  require(ps > 0.0, ErrorCode::kZeroPower, "speech has zero power");
  require(pn > 0.0, ErrorCode::kZeroPower, "noise has zero power");
  const double g = std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));

  Waveform out = speech;
  for (std::size_t i = 0; i < fitted.size(); ++i)
    out.samples[i] = static_cast<float>(speech.samples[i] + g * fitted[i]);
  return out;
}

/// Full linear convolution; direct for short kernels, FFT otherwise.
inline std::vector<double> convolve(std::span<const float> a,
                                    std::span<const float> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t full = a.size() + b.size() - 1;
  if (std::min(a.size(), b.size()) <= 256) {
    std::vector<double> out(full, 0.0);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double bj = b[j];
      if (bj == 0.0) continue;
      for (std::size_t i = 0; i < a.size(); ++i) out[i + j] += a[i] * bj;
    }
    return out;
  }
  const std::size_t n = std::bit_ceil(full);
  const RealFft& fft = RealFft::get(std::max<std::size_t>(n, 2));
  std::vector<double> xa(fft.size(), 0.0), xb(fft.size(), 0.0);
  std::copy(a.begin(), a.end(), xa.begin());
  std::copy(b.begin(), b.end(), xb.begin());
  std::vector<std::complex<double>> fa(fft.bins()), fb(fft.bins());
  fft.forward(xa, fa);
  fft.forward(xb, fb);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  std::vector<double> out(fft.size());
  fft.inverse(fa, out);
  const double inv = 1.0 / static_cast<double>(fft.size());
  out.resize(full);
  for (double& v : out) v *= inv;
  return out;
}

/// Reverberates speech with an impulse response; the result keeps the
/// speech length and is rescaled to the dry signal's peak.
inline Waveform apply_rir(const Waveform& speech, const Waveform& rir) {
  validate(speech);
  validate(rir);
  require(speech.sample_rate == rir.sample_rate,
          ErrorCode::kSampleRateMismatch, "speech and rir sample rates differ");
  require(!rir.samples.empty(), ErrorCode::kInvalidArgument, "empty rir");
  const auto wet = convolve(speech.samples, rir.samples);
  Waveform out;
  out.sample_rate = speech.sample_rate;
  out.samples.resize(speech.samples.size());
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] = static_cast<float>(wet[i]);

  const float dry_peak = peak_abs(speech.samples);
  const float wet_peak = peak_abs(out.samples);
  if (wet_peak > 0.0f && wet_peak != dry_peak) {
    const double scale = static_cast<double>(dry_peak) / wet_peak;
    for (auto& s : out.samples) s = static_cast<float>(s * scale);
  }
  return out;
}

/// Resampling-based tempo and pitch change; output length round(len/factor).
inline Waveform speed_perturb(const Waveform& speech, double factor) {
  validate(speech);
  require(factor > 0.0, ErrorCode::kInvalidArgument,
          "speed factor must be positive");
  if (factor == 1.0) return speech;
  const auto out_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(speech.samples.size()) / factor));
  Waveform out;
  out.sample_rate = speech.sample_rate;
  out.samples = detail::resample_by_step(speech.samples, factor, out_len);
  return out;
}

/// Speed-perturbed copies are distinct speakers: "sp0.9-<spk>".
inline std::string speed_perturbed_label(const std::string& speaker,
                                         double factor) {
  if (factor == 1.0) return speaker;
  std::ostringstream os;
  os << "sp" << factor << "-" << speaker;
  return os.str();
}

namespace detail {
inline double grand_mean(const MatrixD& m) {
  if (m.data().empty()) return 0.0;
  double acc = 0.0;
  for (double v : m.data()) acc += v;
  return acc / static_cast<double>(m.data().size());
}
}  // namespace detail

/// One time mask and one frequency mask, filled with the utterance mean.
/// Time warping is not applied.
inline MelSpectrogram spec_augment(const MelSpectrogram& mel,
                                   const AugConfig& cfg, Rng& rng) {
  const auto T = static_cast<std::int64_t>(mel.frames.rows());
  const auto F = static_cast<std::int64_t>(mel.frames.cols());
  require(cfg.spec_time_mask_max >= 0 && cfg.spec_time_mask_max <= T &&
              cfg.spec_freq_mask_max >= 0 && cfg.spec_freq_mask_max <= F,
          ErrorCode::kInvalidArgument,
          "mask maxima exceed the spectrogram dimensions");
  MelSpectrogram out = mel;
  const double fill = detail::grand_mean(mel.frames);

  const std::int64_t u = rng.uniform_int(0, cfg.spec_time_mask_max);
  const std::int64_t t0 = rng.uniform_int(0, T - u);
  for (std::int64_t t = t0; t < t0 + u; ++t)
    for (std::int64_t k = 0; k < F; ++k)
      out.frames(static_cast<std::size_t>(t), static_cast<std::size_t>(k)) = fill;

  const std::int64_t v = rng.uniform_int(0, cfg.spec_freq_mask_max);
  const std::int64_t f0 = rng.uniform_int(0, F - v);
  for (std::int64_t t = 0; t < T; ++t)
    for (std::int64_t k = f0; k < f0 + v; ++k)
      out.frames(static_cast<std::size_t>(t), static_cast<std::size_t>(k)) = fill;
  return out;
}

/// Per-bin offsets (natural-log units) drawn by filter_augment; exposed so
/// the bound can be checked directly.
inline std::vector<double> filter_augment_offsets(std::size_t num_bins,
                                                  const AugConfig& cfg,
                                                  Rng& rng) {
  require(num_bins >= 8, ErrorCode::kInvalidArgument,
          "filter augmentation needs at least 8 bins");
  const auto k = static_cast<std::size_t>(rng.uniform_int(3, 6));
  // Band edges: 0, k-1 distinct interior cuts, num_bins-1.
  std::vector<std::int64_t> interior;
  for (std::int64_t b = 1; b + 1 < static_cast<std::int64_t>(num_bins); ++b)
    interior.push_back(b);
  rng.shuffle(interior);
  std::vector<std::int64_t> edges(interior.begin(),
                                  interior.begin() + static_cast<long>(k - 1));
  edges.push_back(0);
  edges.push_back(static_cast<std::int64_t>(num_bins) - 1);
  std::sort(edges.begin(), edges.end());

  std::vector<double> edge_db(edges.size());
  for (auto& d : edge_db) d = rng.uniform(cfg.filter_db_lo, cfg.filter_db_hi);

  const double db_to_nat = std::log(10.0) / 10.0;
  std::vector<double> offsets(num_bins);
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const auto a = edges[e], b = edges[e + 1];
    for (std::int64_t bin = a; bin <= b; ++bin) {
      const double frac =
          static_cast<double>(bin - a) / static_cast<double>(b - a);
      offsets[static_cast<std::size_t>(bin)] =
          db_to_nat * ((1.0 - frac) * edge_db[e] + frac * edge_db[e + 1]);
    }
  }
  return offsets;
}

/// Adds a random piecewise-linear spectral tilt over 3..6 contiguous bands.
inline MelSpectrogram filter_augment(const MelSpectrogram& mel,
                                     const AugConfig& cfg, Rng& rng) {
  require(std::isfinite(cfg.filter_db_lo) && std::isfinite(cfg.filter_db_hi),
          ErrorCode::kInvalidArgument, "filter_db_range must be finite");
  const auto offsets = filter_augment_offsets(mel.frames.cols(), cfg, rng);
  MelSpectrogram out = mel;
  for (std::size_t t = 0; t < out.frames.rows(); ++t)
    for (std::size_t b = 0; b < out.frames.cols(); ++b)
      out.frames(t, b) += offsets[b];
  return out;
}

/// Splits into shuffle_block_s blocks (last may be short) and permutes them.
inline Waveform shuffle_augment(const Waveform& speech, const AugConfig& cfg,
                                Rng& rng) {
  validate(speech);
  require(cfg.shuffle_block_s > 0.0, ErrorCode::kInvalidArgument,
          "shuffle_block_s must be positive");
  const auto block = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::llround(cfg.shuffle_block_s * speech.sample_rate)));
  const std::size_t n = speech.samples.size();
  const std::size_t num_blocks = (n + block - 1) / block;
  if (num_blocks <= 1) return speech;

  std::vector<std::size_t> order(num_blocks);
  for (std::size_t i = 0; i < num_blocks; ++i) order[i] = i;
  rng.shuffle(order);

  Waveform out;
  out.sample_rate = speech.sample_rate;
  out.samples.reserve(n);
  for (std::size_t b : order) {
    const std::size_t lo = b * block, hi = std::min(n, lo + block);
    out.samples.insert(out.samples.end(), speech.samples.begin() + lo,
                       speech.samples.begin() + hi);
  }
  return out;
}

}  // namespace faraug
