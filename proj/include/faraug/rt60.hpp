// faraug/rt60.hpp

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

// Blind RT60 estimation from running signals: free-decay segments are
// located on a 10 ms energy track, each is fitted with a maximum-likelihood
// exponentially damped Gaussian model, and the per-segment decay times are
// aggregated by a low percentile.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "faraug/audio.hpp"
#include "faraug/error.hpp"
#include "faraug/report.hpp"

namespace faraug {

struct Rt60Config {
  double frame_s = 0.010;
  double min_duration_s = 1.0;
  double min_segment_s = 0.200;
  double hysteresis_db = 2.0;
  double start_above_floor_db = 15.0;
  double stop_above_floor_db = 10.0;
  double floor_percentile = 0.10;
  double aggregate_percentile = 0.20;
  double rt60_min_s = 0.05;
  double rt60_max_s = 3.0;
  int grid_points = 48;
};

struct Rt60Estimate {
  double rt60_s = 0.0;
  double confidence = 0.0;
  std::size_t n_segments = 0;
};

struct DecaySegment {
  std::size_t begin_frame = 0;
  std::size_t end_frame = 0;  // exclusive
};

inline constexpr double kLn1000 = 6.907755278982137;  // 60 dB in e-folds

namespace detail {

inline double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (pos - static_cast<double>(i)) * (v[i + 1] - v[i]);
}

// Negative log-likelihood (up to constants) of x[n] ~ N(0, s^2 d^{2n}),
// d = exp(-1/(tau fs)), with s^2 at its ML value.
inline double decay_nll(const std::vector<double>& x2, double tau, double fs) {
  const double N = static_cast<double>(x2.size());
  const double r = std::exp(2.0 / (tau * fs));  // d^{-2}
  // sum x2[n] r^n = r^{N-1} sum x2[n] r^{-(N-1-n)}; Horner keeps it finite.
  const double rinv = 1.0 / r;
  double acc = 0.0;
  for (double v : x2) acc = acc * rinv + v;
  const double log_sum = (N - 1.0) * std::log(r) + std::log(acc);
  const double log_d = -1.0 / (tau * fs);
  return 0.5 * N * (log_sum - std::log(N)) + log_d * N * (N - 1.0) / 2.0;
}

}  // namespace detail

/// Frame energies in dB of the peak-normalized signal.
inline std::vector<double> energy_track_db(const Waveform& w,
                                           const Rt60Config& cfg = {}) {
  const auto hop = static_cast<std::size_t>(std::lround(cfg.frame_s * w.sample_rate));
  const float peak = peak_abs(w.samples);
  require(peak > 0.0f, ErrorCode::kZeroPower, "silent waveform");
  const std::size_t T = w.samples.size() / hop;
  std::vector<double> db(T);
  for (std::size_t t = 0; t < T; ++t) {
    double e = 0.0;
    for (std::size_t i = 0; i < hop; ++i) {
      const double x = static_cast<double>(w.samples[t * hop + i]) / peak;
      e += x * x;
    }
    db[t] = 10.0 * std::log10(e / static_cast<double>(hop) + 1e-12);
  }
  return db;
}

/// Free-decay segments: start at a local maximum well above the floor,
/// continue while the track stays within the hysteresis of its running
/// minimum and keeps falling over 50 ms, stop on reaching the floor
/// margin (that frame included). The head is trimmed to the last frame
/// within 1 dB of the peak. Kept if long enough, or if it completed its
/// fall to the floor.
inline std::vector<DecaySegment> find_decay_segments(
    const std::vector<double>& db, const Rt60Config& cfg = {}) {
  std::vector<DecaySegment> segs;
  if (db.size() < 2) return segs;
  const double floor = detail::percentile(db, cfg.floor_percentile);
  const auto min_len = static_cast<std::size_t>(
      std::lround(cfg.min_segment_s / cfg.frame_s));
  const std::size_t lag = 5;
  std::size_t t = 0;
  while (t + 1 < db.size()) {
    const bool peak = (t == 0 || db[t] >= db[t - 1]) && db[t] >= db[t + 1];
    if (!peak || db[t] < floor + cfg.start_above_floor_db) {
      ++t;
      continue;
    }
    double run_min = db[t];
    std::size_t j = t + 1;
    bool reached_floor = false;
    for (; j < db.size(); ++j) {
      if (db[j] <= floor + cfg.stop_above_floor_db) {
        reached_floor = true;
        break;
      }
      if (db[j] > run_min + cfg.hysteresis_db) break;
      if (j >= t + lag && db[j] >= db[j - lag]) break;
      run_min = std::min(run_min, db[j]);
    }
    std::size_t head = t;
    for (std::size_t k = t; k < j; ++k)
      if (db[k] >= db[t] - 1.0) head = k;
    const std::size_t end = reached_floor ? j + 1 : j;
    if (end - head >= min_len || (reached_floor && end - head >= 2))
      segs.push_back({head, end});
    t = std::max(j, t + 1);
  }
  return segs;
}

/// ML decay time constant (seconds, amplitude e-folding) of one segment:
/// log-spaced grid then golden-section refinement inside the best cell.
inline double fit_decay_tau(std::span<const float> x, int sample_rate,
                            double tau_lo, double tau_hi, int grid_points) {
  std::vector<double> x2(x.size());
  double scale = 0.0;
  for (float v : x) scale = std::max(scale, static_cast<double>(v) * v);
  if (scale <= 0.0) return tau_lo;
  for (std::size_t i = 0; i < x.size(); ++i)
    x2[i] = static_cast<double>(x[i]) * x[i] / scale + 1e-300;
  const double fs = sample_rate;
  auto f = [&](double log_tau) {
    return detail::decay_nll(x2, std::exp(log_tau), fs);
  };
  const double a = std::log(tau_lo), b = std::log(tau_hi);
  int best = 0;
  double best_v = f(a);
  for (int i = 1; i < grid_points; ++i) {
    const double v = f(a + (b - a) * i / (grid_points - 1));
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  const double step = (b - a) / (grid_points - 1);
  double lo = std::max(a, a + step * (best - 1));
  double hi = std::min(b, a + step * (best + 1));
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 60 && hi - lo > 1e-9; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = f(d);
    }
  }
  const double x_best = 0.5 * (lo + hi);
  return std::exp(f(x_best) <= best_v ? x_best : a + step * best);
}

inline Rt60Estimate estimate_rt60(const Waveform& w, const Rt60Config& cfg = {}) {
  require(w.duration_s() >= cfg.min_duration_s, ErrorCode::kTooShort,
          "RT60 estimation needs at least " + std::to_string(cfg.min_duration_s) +
              " s of audio");
  const auto db = energy_track_db(w, cfg);
  const auto segs = find_decay_segments(db, cfg);
  require(!segs.empty(), ErrorCode::kNoDecaySegments,
          "no free-decay segments found");
  const auto hop = static_cast<std::size_t>(std::lround(cfg.frame_s * w.sample_rate));
  const double tau_lo = cfg.rt60_min_s / kLn1000, tau_hi = cfg.rt60_max_s / kLn1000;
  std::vector<double> rt;
  rt.reserve(segs.size());
  for (const auto& s : segs) {
    const std::span<const float> x(w.samples.data() + s.begin_frame * hop,
                                   (s.end_frame - s.begin_frame) * hop);
    rt.push_back(kLn1000 * fit_decay_tau(x, w.sample_rate, tau_lo, tau_hi,
                                         cfg.grid_points));
  }
  Rt60Estimate out;
  out.n_segments = rt.size();
  out.rt60_s = std::clamp(detail::percentile(rt, cfg.aggregate_percentile),
                          cfg.rt60_min_s, cfg.rt60_max_s);
  const bool at_bound = out.rt60_s <= cfg.rt60_min_s * (1.0 + 1e-6) ||
                        out.rt60_s >= cfg.rt60_max_s * (1.0 - 1e-6);
  if (!at_bound) {
    std::size_t near = 0;
    for (double r : rt) near += std::fabs(r - out.rt60_s) <= 0.3 * out.rt60_s;
    out.confidence = static_cast<double>(near) / static_cast<double>(rt.size());
  }
  return out;
}

enum class Closer { kB, kC, kTie };

inline std::string_view to_string(Closer c) {
  switch (c) {
    case Closer::kB: return "b";
    case Closer::kC: return "c";
    case Closer::kTie: return "tie";
  }
  return "tie";
}

struct ClosenessReport {
  double rt60_a = 0.0, rt60_b = 0.0, rt60_c = 0.0;
  Closer closer_to = Closer::kTie;
};

/// Which of b, c has the RT60 nearer to a's.
inline ClosenessReport compare_rt60(const Waveform& a, const Waveform& b,
                                    const Waveform& c,
                                    const Rt60Config& cfg = {}) {
  ClosenessReport r;
  r.rt60_a = estimate_rt60(a, cfg).rt60_s;
  r.rt60_b = estimate_rt60(b, cfg).rt60_s;
  r.rt60_c = estimate_rt60(c, cfg).rt60_s;
  const double db = std::fabs(r.rt60_b - r.rt60_a);
  const double dc = std::fabs(r.rt60_c - r.rt60_a);
  r.closer_to = db < dc ? Closer::kB : dc < db ? Closer::kC : Closer::kTie;
  return r;
}

struct LabeledRt60 {
  std::string label;
  Rt60Estimate estimate;
};

/// Scatter of RT60 per utterance, one series per distinct label in order
/// of first appearance.
inline std::string rt60_plot_svg(const std::vector<LabeledRt60>& estimates) {
  require(!estimates.empty(), ErrorCode::kInvalidArgument,
          "no RT60 estimates to plot");
  std::vector<ScatterGroup> groups;
  for (const auto& e : estimates) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const ScatterGroup& g) { return g.label == e.label; });
    if (it == groups.end()) {
      groups.push_back({e.label, {}});
      it = groups.end() - 1;
    }
    it->values.push_back(e.estimate.rt60_s);
  }
  return group_scatter_svg(groups, "Estimated RT60", "RT60 (s)");
}

inline void emit_rt60_plot(const std::vector<LabeledRt60>& estimates,
                           const std::filesystem::path& path) {
  write_text_file(path, rt60_plot_svg(estimates));
}

}  // namespace faraug
