// faraug/embedder.hpp

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

// Utterance embeddings (pluggable backend, deterministic toy statistics
// embedder) and the additive angular margin softmax loss with its gradient.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "faraug/audio.hpp"
#include "faraug/error.hpp"
#include "faraug/features.hpp"
#include "faraug/matrix.hpp"
#include "faraug/rng.hpp"
#include "faraug/scoring.hpp"

namespace faraug {

struct SpeakerEmbedding {
  std::string utt_id;
  std::vector<float> vector;
};

class EmbedderBackend {
 public:
  virtual ~EmbedderBackend() = default;
  virtual std::string id() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::vector<float> embed(const Waveform& w) const = 0;
};

inline SpeakerEmbedding embed(const EmbedderBackend& backend,
                              const std::string& utt_id, const Waveform& w) {
  return {utt_id, backend.embed(w)};
}

/// Log-mel statistics embedder. The log-mel is centred on its grand mean
/// (cancels waveform gain), per-bin mean and std are stacked (160 values),
/// the statistics of a fixed white-noise reference are subtracted, and a
/// seeded 192 x 160 Gaussian projection maps to the embedding, which is
/// L2-normalized.
class ToyEmbedder : public EmbedderBackend {
 public:
  static constexpr std::size_t kStatsDim = 2 * kNumMelBins;
  static constexpr std::size_t kDim = 192;
  static constexpr std::uint64_t kSeed = 0xE3BEDDE5ULL;

  ToyEmbedder() : proj_(kDim, kStatsDim) {
    Rng rng(kSeed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(kStatsDim));
    for (auto& v : proj_.data()) v = rng.normal() * scale;
    Rng noise(kSeed + 1);
    Waveform ref;
    ref.samples.resize(4 * kWorkingRate);
    for (auto& s : ref.samples) s = static_cast<float>(0.1 * noise.normal());
    reference_ = stats(ref);
  }

  std::string id() const override { return "toy-stats-v1"; }
  std::size_t dim() const override { return kDim; }

  static std::vector<double> stats(const Waveform& w) {
    const MelSpectrogram mel = log_mel(w);
    const MatrixD& m = mel.frames;
    const std::size_t T = m.rows(), D = m.cols();
    const double grand =
        std::accumulate(m.data().begin(), m.data().end(), 0.0) /
        static_cast<double>(m.data().size());
    std::vector<double> s(2 * D, 0.0);
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t k = 0; k < D; ++k) s[k] += m(t, k) - grand;
    for (std::size_t k = 0; k < D; ++k) s[k] /= static_cast<double>(T);
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t k = 0; k < D; ++k) {
        const double d = m(t, k) - grand - s[k];
        s[D + k] += d * d;
      }
    for (std::size_t k = 0; k < D; ++k)
      s[D + k] = std::sqrt(s[D + k] / static_cast<double>(T));
    return s;
  }

  std::vector<float> embed(const Waveform& w) const override {
    std::vector<double> s = stats(w);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] -= reference_[i];
    std::vector<double> e(kDim, 0.0);
    double norm = 0.0;
    for (std::size_t r = 0; r < kDim; ++r) {
      const auto row = proj_.row(r);
      for (std::size_t c = 0; c < kStatsDim; ++c) e[r] += row[c] * s[c];
      norm += e[r] * e[r];
    }
    norm = std::sqrt(norm);
    require(norm > 0.0 && std::isfinite(norm), ErrorCode::kZeroPower,
            "degenerate embedding (zero norm)");
    std::vector<float> out(kDim);
    for (std::size_t r = 0; r < kDim; ++r)
      out[r] = static_cast<float>(e[r] / norm);
    return out;
  }

 private:
  MatrixD proj_;
  std::vector<double> reference_;
};

// ---------------------------------------------------------------------------
// Embedding dump: "utt_id v1 ... vD" per line, values at 9 significant
// digits (exact float round trip).

inline void write_embeddings(const std::vector<SpeakerEmbedding>& embs,
                             const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::kIo,
          "cannot write " + path.string());
  char buf[32];
  for (const auto& e : embs) {
    out << e.utt_id;
    for (float v : e.vector) {
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
      out << '\t' << buf;
    }
    out << '\n';
  }
  require(static_cast<bool>(out), ErrorCode::kIo,
          "write failed: " + path.string());
}

inline EmbeddingTable read_embeddings(const std::filesystem::path& path,
                                      EmbeddingTable table = {}) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kFileNotFound,
          "cannot open embeddings " + path.string());
  std::string line;
  std::size_t lineno = 0, dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string id;
    ls >> id;
    std::vector<float> v;
    float x;
    while (ls >> x) v.push_back(x);
    require(ls.eof() && !v.empty() && (dim == 0 || v.size() == dim),
            ErrorCode::kMalformedHeader,
            path.string() + ":" + std::to_string(lineno) + ": bad embedding row");
    dim = v.size();
    require(table.emplace(id, std::move(v)).second, ErrorCode::kDuplicateId,
            "duplicate embedding for '" + id + "'");
  }
  return table;
}

// ---------------------------------------------------------------------------
// AAM softmax.

struct AamParams {
  double margin = 0.2;
  double scale = 30.0;
};

struct AamResult {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d e (unnormalized input)
};

/// W is C x D with unit-norm rows; e need not be normalized.
inline AamResult aam_softmax_loss(std::span<const double> e, std::size_t label,
                                  const MatrixD& W, const AamParams& p = {}) {
  const std::size_t C = W.rows(), D = W.cols();
  require(label < C, ErrorCode::kInvalidArgument,
          "label " + std::to_string(label) + " out of range for " +
              std::to_string(C) + " classes");
  require(e.size() == D, ErrorCode::kShapeMismatch,
          "embedding dim does not match class weights");
  require(p.margin >= 0.0 && p.margin < std::numbers::pi / 2 && p.scale > 0.0,
          ErrorCode::kInvalidArgument, "bad AAM parameters");
  double en = 0.0;
  for (double v : e) en += v * v;
  en = std::sqrt(en);
  require(en > 0.0, ErrorCode::kZeroPower, "zero embedding");
  std::vector<double> u(D);
  for (std::size_t i = 0; i < D; ++i) u[i] = e[i] / en;

  std::vector<double> cos(C), z(C);
  for (std::size_t j = 0; j < C; ++j) {
    const auto w = W.row(j);
    double c = 0.0;
    for (std::size_t i = 0; i < D; ++i) c += w[i] * u[i];
    cos[j] = std::clamp(c, -1.0, 1.0);
    z[j] = p.scale * cos[j];
  }
  const double cm = std::cos(p.margin), sm = std::sin(p.margin);
  const double sin_y = std::sqrt(std::max(0.0, 1.0 - cos[label] * cos[label]));
  z[label] = p.scale * (cos[label] * cm - sin_y * sm);

  // loss = logsumexp(z) - z_y, computed relative to the largest logit.
  const std::size_t jmax =
      static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
  std::vector<double> prob(C);
  double sum = 0.0;
  for (std::size_t j = 0; j < C; ++j) sum += prob[j] = std::exp(z[j] - z[jmax]);
  AamResult r;
  if (jmax == label) {
    double rest = 0.0;
    for (std::size_t j = 0; j < C; ++j)
      if (j != label) rest += prob[j];
    r.loss = std::log1p(rest);
  } else {
    r.loss = (z[jmax] - z[label]) + std::log(sum);
  }
  for (auto& q : prob) q /= sum;

  // dL/dcos_j, then through u = e/|e|.
  std::vector<double> g(D, 0.0);
  for (std::size_t j = 0; j < C; ++j) {
    double dz = prob[j] - (j == label ? 1.0 : 0.0);
    double dc = p.scale;
    if (j == label)
      dc = sin_y > 0.0 ? p.scale * (cm + sm * cos[label] / sin_y) : p.scale * cm;
    const auto w = W.row(j);
    for (std::size_t i = 0; i < D; ++i) g[i] += dz * dc * w[i];
  }
  const double ug = std::inner_product(u.begin(), u.end(), g.begin(), 0.0);
  r.grad.resize(D);
  for (std::size_t i = 0; i < D; ++i) r.grad[i] = (g[i] - u[i] * ug) / en;
  return r;
}

}  // namespace faraug
