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

// Independent references for the AAM softmax kernel: plain softmax
// cross-entropy on cosine logits and central finite differences.

#include <cmath>
#include <functional>
#include <vector>

#include "faraug/matrix.hpp"
#include "faraug/rng.hpp"

namespace faraug::testing {

struct AamInstance {
  std::vector<double> e;
  std::size_t label = 0;
  MatrixD W;
};

inline AamInstance random_aam_instance(Rng& rng) {
  AamInstance a;
  const auto C = static_cast<std::size_t>(rng.uniform_int(2, 12));
  const auto D = static_cast<std::size_t>(rng.uniform_int(3, 24));
  a.W = MatrixD(C, D);
  for (std::size_t j = 0; j < C; ++j) {
    double n = 0.0;
    for (std::size_t i = 0; i < D; ++i) n += std::pow(a.W(j, i) = rng.normal(), 2);
    for (std::size_t i = 0; i < D; ++i) a.W(j, i) /= std::sqrt(n);
  }
  a.e.resize(D);
  const double scale = rng.uniform(0.5, 3.0);
  for (auto& v : a.e) v = scale * rng.normal();
  a.label = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(C) - 1));
  return a;
}

inline double softmax_xent_cosine(const std::vector<double>& e,
                                  std::size_t label, const MatrixD& W) {
  double en = 0.0;
  for (double v : e) en += v * v;
  en = std::sqrt(en);
  double denom = 0.0, num = 0.0;
  for (std::size_t j = 0; j < W.rows(); ++j) {
    double c = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) c += W(j, i) * e[i] / en;
    denom += std::exp(c);
    if (j == label) num = std::exp(c);
  }
  return -std::log(num / denom);
}

inline std::vector<double> central_difference(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const std::vector<double>& a,
                             const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
}

}  // namespace faraug::testing
