// faraug/toy_codec.hpp

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

// Deterministic subspace codec.  Each 80-dim log-mel frame is rotated by a
// fixed orthogonal matrix Q and the coordinates are cut into contiguous
// prosody / content / speaker / residual blocks.  The utterance speaker
// vector is the normalized time-mean of the speaker block.
//
// Synthesis rebuilds the target log-mel frames, turns the difference to the
// analysed frames into per-bin gains on the stored STFT, and inverts with
// overlap-add.  A short Newton loop on a constant speaker-subspace offset
// makes the resynthesized audio re-analyse to the requested speaker vector.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "faraug/audio.hpp"
#include "faraug/codec.hpp"
#include "faraug/features.hpp"
#include "faraug/matrix.hpp"
#include "faraug/rng.hpp"

namespace faraug {

inline constexpr std::uint64_t kToyCodecSeed = 0xFAC0DEC;

/// Orthogonal n x n matrix (rows orthonormal) from seeded Gram-Schmidt.
/// Row 0 is the normalized all-ones vector, so a uniform log-mel offset
/// (a waveform gain) only moves the first prosody coordinate.
inline MatrixD seeded_rotation(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  MatrixD q(n, n);
  for (auto& v : q.data()) v = rng.normal();
  for (std::size_t k = 0; k < n; ++k) q(0, k) = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < i; ++j) {
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) dot += q(i, k) * q(j, k);
        for (std::size_t k = 0; k < n; ++k) q(i, k) -= dot * q(j, k);
      }
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) norm += q(i, k) * q(i, k);
    norm = std::sqrt(norm);
    require(norm > 1e-8, ErrorCode::kInvalidArgument,
            "degenerate rotation seed");
    for (std::size_t k = 0; k < n; ++k) q(i, k) /= norm;
  }
  return q;
}

class ToyCodec : public CodecBackend {
 public:
  explicit ToyCodec(CodecDims dims = {8, 32, 16, 24})
      : dims_(dims), q_(seeded_rotation(kNumMelBins, kToyCodecSeed)) {
    require(dims.total() == static_cast<std::size_t>(kNumMelBins) &&
                dims.speaker > 0,
            ErrorCode::kConfig, "toy codec blocks must sum to 80");
    // Linear-bin image of each speaker axis: sum_k Q[s+i, k] W[k, :].
    const MatrixD& fb = default_filterbank(kWorkingRate);
    spk_bins_ = MatrixD(dims_.speaker, fb.cols(), 0.0);
    for (std::size_t i = 0; i < dims_.speaker; ++i)
      for (std::size_t k = 0; k < kNumMelBins; ++k) {
        const double qk = q_(speaker_at() + i, k);
        for (std::size_t b = 0; b < fb.cols(); ++b) spk_bins_(i, b) += qk * fb(k, b);
      }
  }

  std::string id() const override { return "toy-subspace-v1"; }
  CodecDims dims() const override { return dims_; }
  int sample_rate() const override { return kWorkingRate; }
  const MatrixD& rotation() const { return q_; }

  FactorizedSpeech disentangle(const Waveform& x) const override {
    const Waveform x16 = resample(x, kWorkingRate);
    const Analysis a = analyze(x16);
    const std::size_t T = a.spec.frames.rows();
    const auto mu = speaker_mean(a.coords);
    double nu = 0.0;
    for (double v : mu) nu += v * v;
    nu = std::sqrt(nu);
    require(nu > 1e-9, ErrorCode::kZeroPower,
            "speaker block carries no energy (silent input?)");

    FactorizedSpeech f;
    f.backend_id = id();
    f.prosody = MatrixF(T, dims_.prosody);
    f.content = MatrixF(T, dims_.content);
    f.residual = MatrixF(T, dims_.residual);
    for (std::size_t t = 0; t < T; ++t) {
      const auto z = a.coords.row(t);
      for (std::size_t i = 0; i < dims_.prosody; ++i)
        f.prosody(t, i) = static_cast<float>(z[i]);
      for (std::size_t i = 0; i < dims_.content; ++i)
        f.content(t, i) = static_cast<float>(z[content_at() + i]);
      for (std::size_t i = 0; i < dims_.residual; ++i)
        f.residual(t, i) = static_cast<float>(z[residual_at() + i]);
    }
    f.speaker.resize(dims_.speaker);
    for (std::size_t i = 0; i < dims_.speaker; ++i)
      f.speaker[i] = static_cast<float>(mu[i] / nu);

    // Bookkeeping: speaker-block norm, then the analysed samples (which
    // carry the phase and the linear-frequency detail the mel drops).
    const std::size_t len = frame_geometry(kWorkingRate).covered_samples(T);
    f.detail.reserve(1 + len);
    f.detail.push_back(static_cast<float>(nu));
    f.detail.insert(f.detail.end(), x16.samples.begin(),
                    x16.samples.begin() + static_cast<long>(len));
    return f;
  }

  Waveform synthesize(const FactorizedSpeech& f) const override {
    require(f.dims() == dims_, ErrorCode::kShapeMismatch,
            "factorized dims " + to_string(f.dims()) + " do not match toy " +
                to_string(dims_));
    const std::size_t T = f.num_frames();
    const FrameGeometry g = frame_geometry(kWorkingRate);
    if (all_zero(f)) {
      Waveform z;
      z.samples.assign(g.covered_samples(T), 0.0f);
      return z;
    }
    validate(f);
    const std::size_t len = g.covered_samples(T);
    require(f.detail.size() == 1 + len, ErrorCode::kBackendError,
            "toy synthesis needs the analysis detail recorded at disentangle");

    // Re-analyse the stored samples exactly as disentangle did.
    Waveform dry;
    dry.samples.assign(f.detail.begin() + 1, f.detail.end());
    const Analysis src = analyze(dry);
    const double nu = f.detail[0];

    // Coordinate change per frame.  Untouched float blocks cancel exactly.
    MatrixD dz(T, kNumMelBins, 0.0);
    std::vector<double> target(dims_.speaker);
    for (std::size_t i = 0; i < dims_.speaker; ++i)
      target[i] = nu * static_cast<double>(f.speaker[i]);
    for (std::size_t t = 0; t < T; ++t) {
      const auto z = src.coords.row(t);
      for (std::size_t i = 0; i < dims_.prosody; ++i)
        dz(t, i) = f.prosody(t, i) - static_cast<float>(z[i]);
      for (std::size_t i = 0; i < dims_.content; ++i)
        dz(t, content_at() + i) =
            f.content(t, i) - static_cast<float>(z[content_at() + i]);
      for (std::size_t i = 0; i < dims_.residual; ++i)
        dz(t, residual_at() + i) =
            f.residual(t, i) - static_cast<float>(z[residual_at() + i]);
      for (std::size_t i = 0; i < dims_.speaker; ++i)
        dz(t, speaker_at() + i) = target[i] - z[speaker_at() + i];
    }
    const MatrixD log_gains = bin_log_gains(src.spec, unrotate(dz));

    std::vector<double> gamma(dims_.speaker, 0.0);
    auto eval = [&](const std::vector<double>& gm, Waveform& out) {
      out = render(src.spec, dry.samples, log_gains, gm);
      for (float v : out.samples)
        if (!std::isfinite(v))
          return std::vector<double>(dims_.speaker,
                                     std::numeric_limits<double>::infinity());
      return speaker_mean(analyze(out).coords);
    };
    // Only the direction of the re-analysed speaker mean is constrained.
    std::vector<double> s_dir(f.speaker.begin(), f.speaker.end());
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
      double acc = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
      return acc;
    };
    auto residual = [&](const std::vector<double>& mean) {
      const double an = std::sqrt(dot(mean, mean));
      std::vector<double> r(mean.size());
      for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = nu * (mean[i] / an - s_dir[i]);
      return r;
    };
    auto direction_error = [&](const std::vector<double>& mean) {
      const double an = std::sqrt(dot(mean, mean));
      double acc = 0.0;
      for (std::size_t i = 0; i < mean.size(); ++i) {
        const double d = mean[i] / an - s_dir[i];
        acc += d * d;
      }
      return std::isfinite(acc) ? std::sqrt(acc) : 2.0;
    };

    Waveform best;
    std::vector<double> mean = eval(gamma, best);
    std::vector<double> r = residual(mean);
    double cost = dot(r, r);

    // Levenberg-Marquardt on gamma with a finite-difference Jacobian.
    const std::size_t S = dims_.speaker;
    MatrixD jac(S, S), normal(S, S);
    Waveform scratch;
    double lambda = 1e-3;
    for (int iter = 0; iter < 40 && direction_error(mean) > kDirectionTol;
         ++iter) {
      const double h = 1e-4;
      for (std::size_t j = 0; j < S; ++j) {
        auto gh = gamma;
        gh[j] += h;
        const auto rh = residual(eval(gh, scratch));
        for (std::size_t i = 0; i < S; ++i) jac(i, j) = (rh[i] - r[i]) / h;
      }
      std::vector<double> grad(S, 0.0);
      for (std::size_t a = 0; a < S; ++a) {
        for (std::size_t b = 0; b < S; ++b) {
          double acc = 0.0;
          for (std::size_t i = 0; i < S; ++i) acc += jac(i, a) * jac(i, b);
          normal(a, b) = acc;
        }
        for (std::size_t i = 0; i < S; ++i) grad[a] -= jac(i, a) * r[i];
      }
      bool accepted = false;
      for (int attempt = 0; attempt < 10 && !accepted; ++attempt) {
        MatrixD damped = normal;
        for (std::size_t a = 0; a < S; ++a)
          damped(a, a) += lambda * std::max(normal(a, a), 1e-12);
        std::vector<double> step;
        if (!solve_linear(damped, grad, step)) {
          lambda *= 10.0;
          continue;
        }
        auto next = gamma;
        for (std::size_t i = 0; i < S; ++i) next[i] += step[i];
        const auto mn = eval(next, scratch);
        const auto rn = residual(mn);
        const double cn = dot(rn, rn);
        if (std::isfinite(cn) && cn < cost) {
          gamma = next;
          mean = mn;
          r = rn;
          cost = cn;
          best = scratch;
          lambda = std::max(lambda / 5.0, 1e-9);
          accepted = true;
        } else {
          lambda *= 8.0;
        }
      }
      if (!accepted) break;
    }
    return best;
  }

 private:
  struct Analysis {
    Spectrogram spec;
    MatrixD mel;
    MatrixD coords;
  };

  std::size_t content_at() const { return dims_.prosody; }
  std::size_t speaker_at() const { return dims_.prosody + dims_.content; }
  std::size_t residual_at() const { return speaker_at() + dims_.speaker; }

  static bool all_zero(const FactorizedSpeech& f) {
    auto zero = [](std::span<const float> v) {
      return std::all_of(v.begin(), v.end(), [](float x) { return x == 0.0f; });
    };
    return zero(f.prosody.data()) && zero(f.content.data()) &&
           zero(f.speaker) && zero(f.residual.data());
  }

  MatrixD rotate(const MatrixD& mel) const {
    MatrixD z(mel.rows(), kNumMelBins);
    for (std::size_t t = 0; t < mel.rows(); ++t)
      for (std::size_t i = 0; i < kNumMelBins; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < kNumMelBins; ++k) acc += q_(i, k) * mel(t, k);
        z(t, i) = acc;
      }
    return z;
  }

  MatrixD unrotate(const MatrixD& z) const {
    MatrixD m(z.rows(), kNumMelBins, 0.0);
    for (std::size_t t = 0; t < z.rows(); ++t)
      for (std::size_t i = 0; i < kNumMelBins; ++i) {
        const double zi = z(t, i);
        if (zi == 0.0) continue;
        for (std::size_t k = 0; k < kNumMelBins; ++k) m(t, k) += q_(i, k) * zi;
      }
    return m;
  }

  /// STFT, log-mel and rotated coordinates.
  Analysis analyze(const Waveform& x) const {
    Analysis a;
    a.spec = stft(x);
    a.mel = log_mel_from_power(power_spectrum(a.spec),
                               default_filterbank(kWorkingRate));
    a.coords = rotate(a.mel);
    return a;
  }

  std::vector<double> speaker_mean(const MatrixD& coords) const {
    std::vector<double> mu(dims_.speaker, 0.0);
    for (std::size_t t = 0; t < coords.rows(); ++t)
      for (std::size_t i = 0; i < dims_.speaker; ++i)
        mu[i] += coords(t, speaker_at() + i);
    for (double& v : mu) v /= static_cast<double>(coords.rows());
    return mu;
  }

  /// Per-frame log power gains on linear bins: L_f = sum_k W_kf delta_k.
  MatrixD bin_log_gains(const Spectrogram& spec, const MatrixD& delta) const {
    const MatrixD& fb = default_filterbank(kWorkingRate);
    const std::size_t T = spec.frames.rows(), F = spec.frames.cols();
    MatrixD gains(T, F, 0.0);
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t k = 0; k < kNumMelBins; ++k) {
        const double d = delta(t, k);
        if (d == 0.0) continue;
        const auto wk = fb.row(k);
        for (std::size_t b = 0; b < F; ++b) gains(t, b) += wk[b] * d;
      }
    return gains;
  }

  /// Applies the bin gains plus a constant speaker-subspace offset gamma.
  /// The change is inverted separately from the dry signal with a floored
  /// window norm, so unmodified frames reproduce the input exactly.
  Waveform render(const Spectrogram& spec, const std::vector<float>& dry,
                  const MatrixD& log_gains,
                  const std::vector<double>& gamma) const {
    const std::size_t T = spec.frames.rows(), F = spec.frames.cols();
    std::vector<double> offset(F, 0.0);
    for (std::size_t i = 0; i < dims_.speaker; ++i) {
      if (gamma[i] == 0.0) continue;
      for (std::size_t b = 0; b < F; ++b) offset[b] += spk_bins_(i, b) * gamma[i];
    }
    Spectrogram out = spec;
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t b = 0; b < F; ++b)
        out.frames(t, b) *= std::exp(0.5 * (log_gains(t, b) + offset[b])) - 1.0;
    const auto change = istft_samples(out, kEdgeNorm);
    Waveform w;
    w.sample_rate = kWorkingRate;
    w.samples.resize(dry.size());
    for (std::size_t i = 0; i < dry.size(); ++i)
      w.samples[i] = static_cast<float>(static_cast<double>(dry[i]) + change[i]);
    return w;
  }

  static constexpr double kEdgeNorm = 0.1;
  static constexpr double kDirectionTol = 1e-7;

  CodecDims dims_;
  MatrixD q_;
  MatrixD spk_bins_;
};

}  // namespace faraug
