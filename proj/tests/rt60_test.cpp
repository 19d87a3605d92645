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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "faraug/classical_aug.hpp"
#include "faraug/rt60.hpp"
#include "test_signals.hpp"

namespace faraug {
namespace {

using testing::white_noise;

Waveform with_floor(Waveform w, std::uint64_t seed) {
  return testing::mix(w, white_noise(w.size(), 1e-5, seed));
}

TEST(Rt60, DecayingNoiseFromStart) {
  // tau = 0.3 / ln(1000); the estimate must land in [0.24, 0.36].
  const auto e = estimate_rt60(with_floor(testing::decaying_noise(0.3, 2.0, 5), 6));
  EXPECT_GE(e.rt60_s, 0.24);
  EXPECT_LE(e.rt60_s, 0.36);
  EXPECT_GE(e.n_segments, 1u);
}

TEST(Rt60, LongerDecayEstimatesLonger) {
  const auto a = estimate_rt60(with_floor(testing::decaying_noise(1.0, 2.5, 5), 6));
  const auto b = estimate_rt60(with_floor(testing::decaying_noise(0.3, 2.5, 5), 6));
  EXPECT_GT(a.rt60_s, b.rt60_s);
}

TEST(Rt60, AbruptStopHitsLowerBound) {
  Waveform w = white_noise(32000, 0.2, 8);
  for (std::size_t i = 16000; i < w.size(); ++i) w.samples[i] *= 1e-4f;
  const auto e = estimate_rt60(w);
  EXPECT_LE(e.rt60_s, 0.06);
  EXPECT_EQ(e.confidence, 0.0);  // at the bound
}

TEST(Rt60, SyntheticRecoveryGrid) {
  std::vector<double> medians;
  for (double target : {0.2, 0.3, 0.5, 0.8, 1.2}) {
    std::vector<double> est;
    for (std::uint64_t seed = 0; seed < 10; ++seed)
      est.push_back(
          estimate_rt60(testing::interrupted_noise_decay(target, 100 + seed)).rt60_s);
    std::sort(est.begin(), est.end());
    const double median = 0.5 * (est[4] + est[5]);
    EXPECT_NEAR(median, target, 0.2 * target) << target;
    medians.push_back(median);
  }
  EXPECT_TRUE(std::is_sorted(medians.begin(), medians.end()));
}

TEST(Rt60, GainInvariance) {
  const Waveform w = testing::interrupted_noise_decay(0.5, 3);
  const auto ref = estimate_rt60(w);
  for (float g : {0.25f, 0.5f, 2.0f, 8.0f}) {
    Waveform y = w;
    for (auto& s : y.samples) s *= g;
    const auto e = estimate_rt60(y);
    EXPECT_EQ(e.rt60_s, ref.rt60_s) << g;
    EXPECT_EQ(e.n_segments, ref.n_segments);
  }
  for (float g : {0.3f, 1.7f}) {
    Waveform y = w;
    for (auto& s : y.samples) s *= g;
    EXPECT_NEAR(estimate_rt60(y).rt60_s, ref.rt60_s, 1e-6 * ref.rt60_s) << g;
  }
}

TEST(Rt60, ReverberatedThroughApplyRir) {
  // Dry interrupted noise through apply_rir with an RT60 0.4 s response.
  Waveform dry = white_noise(4 * 16000, 0.2, 21);
  for (std::size_t i = 0; i < dry.size(); ++i)
    if (i % 16000 >= 6400) dry.samples[i] = 0.0f;
  const Waveform wet = testing::mix(
      apply_rir(dry, testing::synthetic_rir(0.4, 22)), white_noise(dry.size(), 1e-4, 23));
  const auto e = estimate_rt60(wet);
  EXPECT_GE(e.rt60_s, 0.25);
  EXPECT_LE(e.rt60_s, 0.6);
}

TEST(Rt60, Errors) {
  try {
    estimate_rt60(white_noise(8000, 0.1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooShort);
  }
  try {
    estimate_rt60(white_noise(32000, 0.1, 1));  // stationary: nothing decays
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoDecaySegments);
  }
}

TEST(Rt60, SegmentDetectorOnHandTrack) {
  // Flat at -60 dB, a peak at 0 dB falling 3 dB per frame.
  std::vector<double> db(100, -60.0);
  for (int i = 0; i < 25; ++i) db[30 + i] = -3.0 * i;
  const auto segs = find_decay_segments(db);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].begin_frame, 30u);
  // Stops at the first frame within 10 dB of the floor (-51 at i = 17).
  EXPECT_EQ(segs[0].end_frame, 30u + 17u + 1u);
}

TEST(Rt60, FitRecoversTauOnCleanDecay) {
  for (double rt : {0.1, 0.4, 2.0}) {
    const Waveform w = testing::decaying_noise(rt, std::min(1.0, rt), 9);
    const double tau = fit_decay_tau(w.samples, 16000, 0.05 / kLn1000,
                                     3.0 / kLn1000, 48);
    EXPECT_NEAR(tau * kLn1000, rt, 0.05 * rt);
  }
}

TEST(CompareRt60, ClosenessAndSymmetry) {
  const Waveform a = testing::interrupted_noise_decay(0.5, 1);
  const Waveform b = testing::interrupted_noise_decay(0.45, 2);
  const Waveform c = testing::interrupted_noise_decay(0.15, 3);
  const auto r = compare_rt60(a, b, c);
  EXPECT_EQ(r.closer_to, Closer::kB);
  const auto swapped = compare_rt60(a, c, b);
  EXPECT_EQ(swapped.closer_to, Closer::kC);
  EXPECT_EQ(swapped.rt60_b, r.rt60_c);
  EXPECT_EQ(compare_rt60(a, b, b).closer_to, Closer::kTie);
}

TEST(Rt60Plot, CountsAndDeterminism) {
  std::vector<LabeledRt60> est;
  for (int g = 0; g < 2; ++g)
    for (int i = 0; i < 5; ++i)
      est.push_back({g ? "pseudo-far" : "far", {0.3 + 0.1 * i + g, 1.0, 3}});
  const std::string svg = rt60_plot_svg(est);
  std::size_t points = 0, series = 0;
  for (auto p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1))
    ++points;
  for (auto p = svg.find("class=\"series\""); p != std::string::npos;
       p = svg.find("class=\"series\"", p + 1))
    ++series;
  EXPECT_EQ(points, 10u);
  EXPECT_EQ(series, 2u);
  EXPECT_EQ(svg, rt60_plot_svg(est));
  EXPECT_THROW(rt60_plot_svg({}), Error);
}

}  // namespace
}  // namespace faraug
