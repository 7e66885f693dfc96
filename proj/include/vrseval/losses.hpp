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
#pragma once

// Set-prediction losses: sigmoid focal and dice on masks, cross-entropy on
// class scores, and the prompt grounding loss. Inputs are probabilities;
// nothing here applies a sigmoid or softmax to model outputs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vrseval/error.hpp"
#include "vrseval/mask.hpp"

namespace vrs {

/// Probabilities are clamped to [kProbEpsilon, 1 - kProbEpsilon] before
/// taking logarithms.
inline constexpr double kProbEpsilon = 1e-6;

struct FocalParams {
  double alpha = 0.25;
  double gamma = 2.0;
};

inline void check_focal_params(const FocalParams& p) {
  if (!(p.alpha >= 0.0 && p.alpha <= 1.0) || !(p.gamma >= 0.0) || !std::isfinite(p.gamma)) {
    fail(ErrorKind::kInvalidArgument, "focal parameters need alpha in [0, 1] and gamma >= 0");
  }
}

namespace detail {

inline double clamp_prob(double p) { return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon); }

inline double focal_term(double p, bool target, const FocalParams& params) {
  const double q = clamp_prob(p);
  const double pt = target ? q : 1.0 - q;
  const double at = target ? params.alpha : 1.0 - params.alpha;
  return -at * std::pow(1.0 - pt, params.gamma) * std::log(pt);
}

/// Pixel counts of a hard prediction against a hard target.
struct Confusion {
  double tp = 0, fp = 0, fn = 0, tn = 0;
};

inline Confusion confusion(const RleMask& pred, const RleMask& target) {
  const double inter = static_cast<double>(mask_intersection(pred, target));
  const double pa = static_cast<double>(pred.area());
  const double ta = static_cast<double>(target.area());
  const double n = static_cast<double>(pred.pixel_count());
  return {inter, pa - inter, ta - inter, n - pa - ta + inter};
}

}  // namespace detail

/// Mean over pixels of -alpha_t (1 - p_t)^gamma log(p_t).
inline double focal_loss(std::span<const double> probs, std::span<const std::uint8_t> target,
                         const FocalParams& params = {}) {
  if (probs.size() != target.size()) fail(ErrorKind::kDimension, "focal loss inputs differ in size");
  check_focal_params(params);
  if (probs.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) sum += detail::focal_term(probs[i], target[i] != 0, params);
  return sum / static_cast<double>(probs.size());
}

/// Focal loss of a hard (0/1) mask prediction, computed from pixel counts.
inline double focal_loss(const RleMask& pred, const RleMask& target, const FocalParams& params = {}) {
  check_focal_params(params);
  const auto c = detail::confusion(pred, target);
  const double sum = c.tp * detail::focal_term(1.0, true, params) + c.fn * detail::focal_term(0.0, true, params) +
                     c.fp * detail::focal_term(1.0, false, params) + c.tn * detail::focal_term(0.0, false, params);
  return sum / static_cast<double>(pred.pixel_count());
}

inline constexpr double kDiceSmoothing = 1.0;

/// 1 - (2 sum(p t) + s) / (sum(p) + sum(t) + s).
inline double dice_loss(std::span<const double> probs, std::span<const std::uint8_t> target) {
  if (probs.size() != target.size()) fail(ErrorKind::kDimension, "dice loss inputs differ in size");
  double inter = 0.0, ps = 0.0, ts = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double t = target[i] ? 1.0 : 0.0;
    inter += probs[i] * t;
    ps += probs[i];
    ts += t;
  }
  return 1.0 - (2.0 * inter + kDiceSmoothing) / (ps + ts + kDiceSmoothing);
}

inline double dice_loss(const RleMask& pred, const RleMask& target) {
  const double inter = static_cast<double>(mask_intersection(pred, target));
  const double ps = static_cast<double>(pred.area());
  const double ts = static_cast<double>(target.area());
  return 1.0 - (2.0 * inter + kDiceSmoothing) / (ps + ts + kDiceSmoothing);
}

/// Single-label cross-entropy -log p(target).
inline double ce_loss(std::span<const double> scores, int target) {
  if (target < 0 || static_cast<std::size_t>(target) >= scores.size()) {
    fail(ErrorKind::kInvalidArgument, "class id " + std::to_string(target) + " outside score vector of size " +
                                          std::to_string(scores.size()));
  }
  return -std::log(std::max(scores[target], kProbEpsilon));
}

/// Multi-label cross-entropy: per-class binary CE averaged over classes.
inline double ce_loss(std::span<const double> scores, std::span<const int> targets) {
  if (scores.empty()) fail(ErrorKind::kInvalidArgument, "empty score vector");
  std::vector<bool> positive(scores.size(), false);
  for (int t : targets) {
    if (t < 0 || static_cast<std::size_t>(t) >= scores.size()) {
      fail(ErrorKind::kInvalidArgument, "class id " + std::to_string(t) + " outside score vector");
    }
    positive[t] = true;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    sum -= positive[i] ? std::log(std::max(scores[i], kProbEpsilon))
                       : std::log(std::max(1.0 - scores[i], kProbEpsilon));
  }
  return sum / static_cast<double>(scores.size());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::kDimension, "vector dimensions differ (" + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Cross-entropy of the softmax over dot-product similarities between the
/// prompt feature and {positive} u negatives, with the positive as target.
inline double grounding_loss(std::span<const double> positive, std::span<const double> prompt,
                             const std::vector<std::vector<double>>& negatives) {
  const double pos = dot(prompt, positive);
  std::vector<double> logits{pos};
  for (const auto& n : negatives) logits.push_back(dot(prompt, n));
  const double mx = *std::max_element(logits.begin(), logits.end());
  if (!std::isfinite(mx)) fail(ErrorKind::kInvalidArgument, "non-finite similarity");
  double z = 0.0;
  for (double l : logits) z += std::exp(l - mx);
  return std::max(0.0, mx + std::log(z) - pos);
}

}  // namespace vrs
