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

// Brute-force EER / minDCF: every candidate threshold is evaluated by
// counting over all scores, no sorting sweep.

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "faraug/rng.hpp"

namespace faraug::testing {

struct ScorePair {
  std::vector<double> target;
  std::vector<double> nontarget;
};

/// Random set with at most `max_trials` trials, coarse rounding so ties
/// occur, both classes non-empty.
inline ScorePair random_score_set(Rng& rng, int max_trials) {
  const int n = static_cast<int>(rng.uniform_int(2, max_trials));
  const int nt = static_cast<int>(rng.uniform_int(1, n - 1));
  const double sep = rng.uniform(-1.0, 3.0);
  const double quant = rng.uniform01() < 0.5 ? 1e-3 : 0.0;
  auto q = [&](double v) { return quant > 0 ? std::round(v / quant) * quant : v; };
  ScorePair s;
  for (int i = 0; i < nt; ++i) s.target.push_back(q(sep + rng.normal()));
  for (int i = nt; i < n; ++i) s.nontarget.push_back(q(rng.normal()));
  return s;
}

struct OracleMetrics {
  double eer = 0.0;
  double min_dcf = 0.0;
};

inline OracleMetrics brute_force_metrics(const std::vector<double>& tgt,
                                         const std::vector<double>& non,
                                         double p_target) {
  std::set<double> distinct(tgt.begin(), tgt.end());
  distinct.insert(non.begin(), non.end());
  const std::vector<double> u(distinct.begin(), distinct.end());
  std::vector<double> taus = {u.front()};
  for (std::size_t i = 0; i + 1 < u.size(); ++i)
    taus.push_back(0.5 * (u[i] + u[i + 1]));
  taus.push_back(std::nextafter(u.back(), std::numeric_limits<double>::infinity()));

  std::vector<double> pm, pf;
  for (double tau : taus) {
    std::size_t miss = 0, fa = 0;
    for (double s : tgt) miss += s < tau;
    for (double s : non) fa += s >= tau;
    pm.push_back(static_cast<double>(miss) / tgt.size());
    pf.push_back(static_cast<double>(fa) / non.size());
  }

  OracleMetrics out;
  for (std::size_t i = 1; i < taus.size(); ++i) {
    const double d1 = pf[i] - pm[i];
    if (d1 > 0.0) continue;
    const double d0 = pf[i - 1] - pm[i - 1];
    out.eer = pm[i - 1] + d0 / (d0 - d1) * (pm[i] - pm[i - 1]);
    break;
  }
  const double norm = std::min(p_target, 1.0 - p_target);
  out.min_dcf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < taus.size(); ++i)
    out.min_dcf = std::min(
        out.min_dcf, (p_target * pm[i] + (1.0 - p_target) * pf[i]) / norm);
  return out;
}

}  // namespace faraug::testing
