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

#include <cmath>

#include "aam_oracle.hpp"
#include "faraug/embedder.hpp"
#include "faraug/scoring.hpp"
#include "test_signals.hpp"

namespace faraug {
namespace {

using testing::white_noise;

const ToyEmbedder& embedder() {
  static const ToyEmbedder e;
  return e;
}

TEST(ToyEmbedder, DeterministicUnitNorm) {
  const Waveform x = testing::burst_train(1, 1.5, 0.2, 0.2, 0.4);
  const auto a = embedder().embed(x);
  const Waveform copy = x;
  const auto b = embedder().embed(copy);
  ASSERT_EQ(a.size(), 192u);
  EXPECT_EQ(a, b);
  double n = 0.0;
  for (float v : a) n += static_cast<double>(v) * v;
  EXPECT_NEAR(std::sqrt(n), 1.0, 1e-6);
}

TEST(ToyEmbedder, GainInvariant) {
  const Waveform x = testing::mix(testing::burst_train(2, 1.5, 0.3, 0.2, -0.3),
                                  white_noise(24000, 0.01, 3));
  const auto a = embedder().embed(x);
  for (float g : {0.5f, 2.0f, 0.3f, 1.7f}) {
    Waveform y = x;
    for (auto& s : y.samples) s *= g;
    const auto b = embedder().embed(y);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-6) << g;
  }
}

TEST(ToyEmbedder, IndependentNoiseIsNotDegenerate) {
  double worst = -1.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto a = embedder().embed(white_noise(16000, 0.1, 1000 + 2 * s));
    const auto b = embedder().embed(white_noise(16000, 0.1, 1001 + 2 * s));
    worst = std::max(worst, cosine_score(a, b));
  }
  EXPECT_LT(worst, 0.9);
}

TEST(ToyEmbedder, SeparatesSpectralShapes) {
  // Two colorings of the same excitation should score lower than two
  // excitations under the same coloring.
  auto colored = [](std::uint64_t seed, double c) {
    return testing::burst_train(seed, 2.0, 0.3, 0.1, c);
  };
  const auto a1 = embedder().embed(colored(10, 0.8));
  const auto a2 = embedder().embed(colored(11, 0.8));
  const auto b1 = embedder().embed(colored(10, -0.6));
  EXPECT_GT(cosine_score(a1, a2), cosine_score(a1, b1));
}

TEST(ToyEmbedder, TooShort) {
  try {
    embedder().embed(white_noise(100, 0.1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooShort);
  }
}

TEST(EmbeddingFile, ExactRoundTrip) {
  const auto dir = testing::temp_dir("emb");
  std::vector<SpeakerEmbedding> embs = {
      embed(embedder(), "u1", white_noise(8000, 0.1, 1)),
      embed(embedder(), "u2", white_noise(8000, 0.1, 2))};
  write_embeddings(embs, dir / "e.tsv");
  const auto t = read_embeddings(dir / "e.tsv");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.at("u1"), embs[0].vector);
  EXPECT_EQ(t.at("u2"), embs[1].vector);
  EXPECT_THROW(read_embeddings(dir / "e.tsv", t), Error);  // duplicates
}

TEST(Aam, AlignedClosedForm) {
  MatrixD W(2, 2);
  W(0, 0) = 1.0;
  W(1, 1) = 1.0;
  const std::vector<double> e = {1.0, 0.0};
  const auto r = aam_softmax_loss(e, 0, W);
  // softplus(-30 cos 0.2), evaluated offline at 30 digits.
  const double expected = 1.70166787610411687e-13;
  EXPECT_NEAR(r.loss / expected, 1.0, 1e-6);
}

TEST(Aam, MarginFreeIsSoftmaxCrossEntropy) {
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto inst = testing::random_aam_instance(rng);
    const auto r = aam_softmax_loss(inst.e, inst.label, inst.W, {0.0, 1.0});
    EXPECT_NEAR(r.loss, testing::softmax_xent_cosine(inst.e, inst.label, inst.W),
                1e-10);
  }
}

TEST(Aam, GradientMatchesFiniteDifferences) {
  Rng rng(2);
  for (int i = 0; i < 60; ++i) {
    const auto inst = testing::random_aam_instance(rng);
    const auto r = aam_softmax_loss(inst.e, inst.label, inst.W);
    const auto fd = testing::central_difference(
        [&](const std::vector<double>& e) {
          return aam_softmax_loss(e, inst.label, inst.W).loss;
        },
        inst.e, 1e-6);
    EXPECT_LE(testing::relative_error(r.grad, fd), 1e-4) << i;
  }
}

TEST(Aam, NonNegativeAndMarginMonotone) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto inst = testing::random_aam_instance(rng);
    const double with = aam_softmax_loss(inst.e, inst.label, inst.W).loss;
    const double without =
        aam_softmax_loss(inst.e, inst.label, inst.W, {0.0, 30.0}).loss;
    EXPECT_GE(with, 0.0);
    EXPECT_GT(with, without);
  }
}

TEST(Aam, DecreasesRotatingTowardTarget) {
  MatrixD W(2, 2);
  W(0, 0) = 1.0;
  W(1, 1) = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 40; ++k) {
    const double th = std::numbers::pi / 2 * (1.0 - k / 40.0);
    const std::vector<double> e = {std::cos(th), std::sin(th)};
    const double l = aam_softmax_loss(e, 0, W).loss;
    EXPECT_LT(l, prev);
    prev = l;
  }
}

TEST(Aam, Errors) {
  MatrixD W(2, 3);
  W(0, 0) = W(1, 1) = 1.0;
  EXPECT_THROW(aam_softmax_loss(std::vector<double>{1, 0, 0}, 2, W), Error);
  EXPECT_THROW(aam_softmax_loss(std::vector<double>{1, 0}, 0, W), Error);
  EXPECT_THROW(aam_softmax_loss(std::vector<double>{0, 0, 0}, 0, W), Error);
}

}  // namespace
}  // namespace faraug
