// faraug/scoring.hpp

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

// Trials, cosine scoring, EER and minDCF.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "faraug/error.hpp"

namespace faraug {

enum class TrialLabel { kTarget, kNontarget, kUnknown };

struct Trial {
  std::string enroll_utt;
  std::string test_utt;
  TrialLabel label = TrialLabel::kUnknown;
  bool operator==(const Trial&) const = default;
};

struct ScoreRow {
  std::string enroll_utt;
  std::string test_utt;
  double score = 0.0;
};
using ScoreSet = std::vector<ScoreRow>;

enum class Fusion { kNone, kCrossaugMean };

inline std::string_view to_string(TrialLabel l) {
  switch (l) {
    case TrialLabel::kTarget: return "target";
    case TrialLabel::kNontarget: return "nontarget";
    case TrialLabel::kUnknown: return "unknown";
  }
  return "unknown";
}

inline TrialLabel parse_trial_label(const std::string& s) {
  if (s == "target") return TrialLabel::kTarget;
  if (s == "nontarget") return TrialLabel::kNontarget;
  if (s == "unknown") return TrialLabel::kUnknown;
  fail(ErrorCode::kInvalidArgument, "bad trial label '" + s + "'");
}

inline Fusion parse_fusion(const std::string& s) {
  if (s == "none") return Fusion::kNone;
  if (s == "crossaug_mean") return Fusion::kCrossaugMean;
  fail(ErrorCode::kInvalidArgument, "unknown fusion mode '" + s + "'");
}

/// Ids of the cross-converted variants of a trial: e' carries the test
/// speaker, x' the enrollment speaker.
inline std::string crossaug_to_test_id(const std::string& enroll,
                                       const std::string& test) {
  return enroll + "__" + test + "__to_test";
}
inline std::string crossaug_to_enroll_id(const std::string& enroll,
                                         const std::string& test) {
  return test + "__" + enroll + "__to_enroll";
}

// ---------------------------------------------------------------------------
// Text formats.

inline std::vector<Trial> parse_trials(std::istream& in,
                                       const std::string& name = "trials") {
  std::vector<Trial> trials;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Trial t;
    std::string label, extra;
    if (!(ls >> t.enroll_utt >> t.test_utt)) {
      if (t.enroll_utt.empty()) continue;
      fail(ErrorCode::kMalformedHeader,
           name + ":" + std::to_string(lineno) + ": expected 'enroll test label'");
    }
    if (ls >> label) t.label = parse_trial_label(label);
    require(!(ls >> extra), ErrorCode::kMalformedHeader,
            name + ":" + std::to_string(lineno) + ": too many fields");
    trials.push_back(std::move(t));
  }
  return trials;
}

inline std::vector<Trial> read_trials(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kFileNotFound,
          "cannot open trial file " + path.string());
  return parse_trials(in, path.string());
}

inline void write_trials(const std::vector<Trial>& trials,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::kIo,
          "cannot write " + path.string());
  for (const auto& t : trials)
    out << t.enroll_utt << ' ' << t.test_utt << ' ' << to_string(t.label)
        << '\n';
}

inline std::string format_score(double s) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", s);
  return buf;
}

inline void write_scores(const ScoreSet& scores, std::ostream& out) {
  for (const auto& r : scores)
    out << r.enroll_utt << ' ' << r.test_utt << ' ' << format_score(r.score)
        << '\n';
}

inline void write_scores(const ScoreSet& scores,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::kIo,
          "cannot write " + path.string());
  write_scores(scores, out);
}

inline ScoreSet read_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kFileNotFound,
          "cannot open score file " + path.string());
  ScoreSet out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ScoreRow r;
    require(static_cast<bool>(ls >> r.enroll_utt >> r.test_utt >> r.score) &&
                std::isfinite(r.score),
            ErrorCode::kMalformedHeader,
            path.string() + ":" + std::to_string(lineno) + ": bad score line");
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scoring.

inline double cosine_score(std::span<const float> a, std::span<const float> b) {
  require(a.size() == b.size(), ErrorCode::kShapeMismatch,
          "embedding dims differ: " + std::to_string(a.size()) + " vs " +
              std::to_string(b.size()));
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<double>(a[i]) * b[i];
    aa += static_cast<double>(a[i]) * a[i];
    bb += static_cast<double>(b[i]) * b[i];
  }
  require(aa > 0.0 && bb > 0.0, ErrorCode::kZeroPower,
          "cosine of a zero-norm embedding");
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

using EmbeddingTable = std::map<std::string, std::vector<float>>;

namespace detail {
inline const std::vector<float>& lookup(const EmbeddingTable& t,
                                        const std::string& id) {
  auto it = t.find(id);
  require(it != t.end(), ErrorCode::kMissingEmbedding,
          "no embedding for utterance '" + id + "'");
  return it->second;
}

// Mean anchored at the first term, so equal terms average to themselves
// bit-for-bit.
inline double anchored_mean(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x - v[0];
  return v[0] + acc / static_cast<double>(v.size());
}
}  // namespace detail

/// Scores every trial. With crossaug_mean the cross-converted variants
/// must be present; `include_cross_pair` adds cos(E(e'), E(x')) to the mean.
inline ScoreSet score_trials(const std::vector<Trial>& trials,
                             const EmbeddingTable& emb, Fusion fusion,
                             bool include_cross_pair = false) {
  ScoreSet out;
  out.reserve(trials.size());
  for (const auto& t : trials) {
    const auto& e = detail::lookup(emb, t.enroll_utt);
    const auto& x = detail::lookup(emb, t.test_utt);
    double s = cosine_score(e, x);
    if (fusion == Fusion::kCrossaugMean) {
      const auto& ep =
          detail::lookup(emb, crossaug_to_test_id(t.enroll_utt, t.test_utt));
      const auto& xp =
          detail::lookup(emb, crossaug_to_enroll_id(t.enroll_utt, t.test_utt));
      std::vector<double> terms = {s, cosine_score(ep, x), cosine_score(e, xp)};
      if (include_cross_pair) terms.push_back(cosine_score(ep, xp));
      s = detail::anchored_mean(terms);
    }
    out.push_back({t.enroll_utt, t.test_utt, s});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metrics.

struct LabeledScores {
  std::vector<double> target;
  std::vector<double> nontarget;
};

/// Joins scores with trial labels by (enroll, test); unknown-label trials
/// are skipped.
inline LabeledScores join_labels(const ScoreSet& scores,
                                 const std::vector<Trial>& trials) {
  std::map<std::pair<std::string, std::string>, TrialLabel> labels;
  for (const auto& t : trials) labels[{t.enroll_utt, t.test_utt}] = t.label;
  LabeledScores out;
  for (const auto& r : scores) {
    auto it = labels.find({r.enroll_utt, r.test_utt});
    require(it != labels.end(), ErrorCode::kUnknownId,
            "score for unlisted trial " + r.enroll_utt + " " + r.test_utt);
    if (it->second == TrialLabel::kTarget) out.target.push_back(r.score);
    if (it->second == TrialLabel::kNontarget) out.nontarget.push_back(r.score);
  }
  return out;
}

struct OperatingPoint {
  double threshold = 0.0;
  double p_miss = 0.0;  // P(target < threshold)
  double p_fa = 0.0;    // P(nontarget >= threshold)
};

/// Every distinct threshold of the sweep: the lowest score (accept all),
/// the midpoints between adjacent distinct scores, and just above the
/// highest score (reject all). Ascending threshold order.
inline std::vector<OperatingPoint> operating_points(
    std::span<const double> target, std::span<const double> nontarget) {
  require(!target.empty() && !nontarget.empty(), ErrorCode::kMissingClass,
          "metrics need at least one target and one nontarget trial");
  struct Item {
    double s;
    bool tgt;
  };
  std::vector<Item> all;
  all.reserve(target.size() + nontarget.size());
  for (double s : target) all.push_back({s, true});
  for (double s : nontarget) all.push_back({s, false});
  for (const auto& it : all)
    require(std::isfinite(it.s), ErrorCode::kInvalidArgument,
            "non-finite score");
  std::sort(all.begin(), all.end(),
            [](const Item& a, const Item& b) { return a.s < b.s; });

  const double nt = static_cast<double>(target.size());
  const double nn = static_cast<double>(nontarget.size());
  std::vector<OperatingPoint> pts;
  std::size_t miss = 0, below_non = 0, i = 0;
  pts.push_back({all.front().s, 0.0, 1.0});
  while (i < all.size()) {
    const double s = all[i].s;
    while (i < all.size() && all[i].s == s) {
      (all[i].tgt ? miss : below_non)++;
      ++i;
    }
    const double tau = i < all.size()
                           ? 0.5 * (s + all[i].s)
                           : std::nextafter(s, std::numeric_limits<double>::infinity());
    pts.push_back({tau, miss / nt, (nn - below_non) / nn});
  }
  return pts;
}

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

/// EER at the first sign change of P_fa - P_miss along the sweep, linearly
/// interpolated between the two bracketing thresholds.
inline EerResult compute_eer(std::span<const double> target,
                             std::span<const double> nontarget) {
  const auto pts = operating_points(target, nontarget);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double d1 = pts[i].p_fa - pts[i].p_miss;
    if (d1 > 0.0) continue;
    const double d0 = pts[i - 1].p_fa - pts[i - 1].p_miss;
    const double a = d0 / (d0 - d1);
    return {pts[i - 1].p_miss + a * (pts[i].p_miss - pts[i - 1].p_miss),
            pts[i - 1].threshold + a * (pts[i].threshold - pts[i - 1].threshold)};
  }
  return {pts.back().p_miss, pts.back().threshold};  // unreachable
}

struct DcfParams {
  double p_target = 0.01;
  double c_miss = 1.0;
  double c_fa = 1.0;
};

struct DcfResult {
  double min_dcf = 0.0;
  double threshold = 0.0;
};

inline double normalized_dcf(double p_miss, double p_fa, const DcfParams& p) {
  const double norm =
      std::min(p.c_miss * p.p_target, p.c_fa * (1.0 - p.p_target));
  return (p.c_miss * p.p_target * p_miss + p.c_fa * (1.0 - p.p_target) * p_fa) /
         norm;
}

inline DcfResult compute_min_dcf(std::span<const double> target,
                                 std::span<const double> nontarget,
                                 const DcfParams& params = {}) {
  require(params.p_target > 0.0 && params.p_target < 1.0 &&
              params.c_miss > 0.0 && params.c_fa > 0.0,
          ErrorCode::kInvalidArgument, "bad DCF parameters");
  const auto pts = operating_points(target, nontarget);
  DcfResult best{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& p : pts) {
    const double c = normalized_dcf(p.p_miss, p.p_fa, params);
    if (c < best.min_dcf) best = {c, p.threshold};
  }
  return best;
}

struct EvalReport {
  std::string name;
  double eer = 0.0;
  double eer_threshold = 0.0;
  double min_dcf = 0.0;
  double dcf_threshold = 0.0;
  double p_target = 0.01;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
  bool operator==(const EvalReport&) const = default;
};

inline EvalReport evaluate(const LabeledScores& s, const DcfParams& params = {},
                           std::string name = "") {
  const EerResult e = compute_eer(s.target, s.nontarget);
  const DcfResult d = compute_min_dcf(s.target, s.nontarget, params);
  return {std::move(name), e.eer, e.threshold, d.min_dcf, d.threshold,
          params.p_target, s.target.size(), s.nontarget.size()};
}

}  // namespace faraug
