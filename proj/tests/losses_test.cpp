// Copyright 2026 The vrseval Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "test_util.hpp"
#include "vrseval/losses.hpp"

namespace {

std::vector<double> as_probs(const oracle::Dense& d) { return {d.begin(), d.end()}; }

TEST(CrossEntropy, UniformScoresGiveLogOfClassCount) {
  const std::vector<double> u(4, 0.25);
  for (int t = 0; t < 4; ++t) EXPECT_NEAR(vrs::ce_loss(u, t), std::log(4.0), 1e-12);
  EXPECT_NEAR(vrs::ce_loss(std::vector<double>{0.0, 1.0}, 0), -std::log(vrs::kProbEpsilon), 1e-12);
  EXPECT_THROW(vrs::ce_loss(u, 4), vrs::Error);
}

TEST(CrossEntropy, MultiLabelAveragesBinaryTerms) {
  const std::vector<double> s{0.5, 0.5, 0.5};
  const std::vector<int> targets{0, 2};
  EXPECT_NEAR(vrs::ce_loss(s, targets), std::log(2.0), 1e-12);
  const std::vector<double> perfect{1.0, 0.0, 1.0};
  EXPECT_NEAR(vrs::ce_loss(perfect, targets), 0.0, 1e-15);
  const std::vector<double> wrong{0.0, 1.0, 0.0};
  EXPECT_NEAR(vrs::ce_loss(wrong, targets), -std::log(vrs::kProbEpsilon), 1e-12);
}

TEST(Focal, ClosedFormAtOneHalf) {
  const std::vector<double> p{0.5};
  const std::vector<std::uint8_t> pos{1}, neg{0};
  EXPECT_NEAR(vrs::focal_loss(p, pos), 0.25 * 0.25 * std::log(2.0), 1e-12);
  EXPECT_NEAR(vrs::focal_loss(p, neg), 0.75 * 0.25 * std::log(2.0), 1e-12);
  EXPECT_NEAR(vrs::focal_loss(p, pos, {1.0, 0.0}), std::log(2.0), 1e-12);
}

TEST(Focal, RejectsBadParameters) {
  const std::vector<double> p{0.5};
  const std::vector<std::uint8_t> t{1};
  EXPECT_THROW(vrs::focal_loss(p, t, {1.5, 2.0}), vrs::Error);
  EXPECT_THROW(vrs::focal_loss(p, t, {0.25, -1.0}), vrs::Error);
  EXPECT_THROW(vrs::focal_loss(p, std::vector<std::uint8_t>{1, 0}), vrs::Error);
}

TEST(Focal, MaskFormMatchesPixelForm) {
  std::mt19937 rng(8);
  for (int i = 0; i < 100; ++i) {
    const int h = testutil::uniform(rng, 2, 30), w = testutil::uniform(rng, 2, 30);
    const auto a = testutil::random_rect(rng, h, w);
    const auto b = testutil::random_rect(rng, h, w);
    const auto da = oracle::dense(a), db = oracle::dense(b);
    EXPECT_NEAR(vrs::focal_loss(a, b), vrs::focal_loss(as_probs(da), db), 1e-12);
    EXPECT_NEAR(vrs::dice_loss(a, b), vrs::dice_loss(as_probs(da), db), 1e-12);
  }
}

TEST(Dice, LargeMaskLimits) {
  const auto big = testutil::rect_mask(640, 640, 0, 0, 600, 600);
  EXPECT_NEAR(vrs::dice_loss(big, big), 0.0, 1e-15);
  const auto left = testutil::rect_mask(640, 640, 0, 0, 300, 640);
  const auto right = testutil::rect_mask(640, 640, 300, 0, 640, 640);
  const double a = 300.0 * 640.0, b = 340.0 * 640.0;
  EXPECT_NEAR(vrs::dice_loss(left, right), 1.0 - 1.0 / (a + b + 1.0), 1e-15);
  EXPECT_GT(vrs::dice_loss(left, right), 0.99999);
  const auto z = vrs::RleMask::zeros(640, 640);
  EXPECT_EQ(vrs::dice_loss(z, z), 0.0);
}

TEST(Grounding, SoftmaxCrossEntropy) {
  const std::vector<double> prompt{1.0, 0.0};
  const std::vector<double> pos{2.0, 0.0};
  EXPECT_NEAR(vrs::grounding_loss(pos, prompt, {}), 0.0, 1e-15);
  EXPECT_NEAR(vrs::grounding_loss(pos, prompt, {{2.0, 5.0}, {2.0, -1.0}}), std::log(3.0), 1e-12);
  const double expect = -std::log(std::exp(2.0) / (std::exp(2.0) + std::exp(3.0)));
  EXPECT_NEAR(vrs::grounding_loss(pos, prompt, {{3.0, 0.0}}), expect, 1e-12);
  EXPECT_THROW(vrs::grounding_loss(pos, std::vector<double>{1.0}, {}), vrs::Error);
}

TEST(Grounding, StableForLargeLogits) {
  const std::vector<double> prompt{1000.0};
  const std::vector<double> pos{1.0};
  const double l = vrs::grounding_loss(pos, prompt, {{1.0}, {0.0}});
  EXPECT_NEAR(l, std::log(2.0), 1e-12);
}

}  // namespace
