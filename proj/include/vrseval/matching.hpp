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

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "vrseval/dataset.hpp"
#include "vrseval/hungarian.hpp"
#include "vrseval/json_io.hpp"
#include "vrseval/losses.hpp"
#include "vrseval/parallel.hpp"

namespace vrs {

/// Loss and matching-cost weights.
struct LossWeights {
  double mask_focal = 1.0;      // lambda_b
  double mask_dice = 1.0;       // lambda_d
  double class_subject = 2.0;   // lambda_c^s
  double class_object = 2.0;    // lambda_c^o
  double class_predicate = 2.0; // lambda_c^p
  double grounding = 2.0;       // lambda_g

  void validate() const {
    for (double w : {mask_focal, mask_dice, class_subject, class_object, class_predicate, grounding}) {
      if (!std::isfinite(w) || w < 0.0) fail(ErrorKind::kInvalidArgument, "loss weights must be finite and >= 0");
    }
  }

  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

/// Built-in presets, selectable by name.
inline std::map<std::string, LossWeights> builtin_weight_presets() {
  return {
      {"default", LossWeights{1.0, 1.0, 2.0, 2.0, 2.0, 2.0}},
      // Subject class head omitted for HOI.
      {"hico", LossWeights{2.0, 1.0, 0.0, 1.0, 2.0, 0.0}},
      {"vcoco", LossWeights{2.0, 1.0, 0.0, 1.0, 2.0, 0.0}},
      {"psg", LossWeights{2.0, 1.0, 1.0, 1.0, 2.0, 0.0}},
      {"promptable", LossWeights{2.0, 1.0, 1.0, 1.0, 2.0, 2.0}},
  };
}

inline Json to_json(const LossWeights& w) {
  return Json{{"lambda_b", w.mask_focal},       {"lambda_d", w.mask_dice},
              {"lambda_c_s", w.class_subject},  {"lambda_c_o", w.class_object},
              {"lambda_c_p", w.class_predicate}, {"lambda_g", w.grounding}};
}

inline LossWeights weights_from_json(const Json& j, LossWeights base = {}) {
  auto read = [&](const char* key, double& field) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_number()) fail(ErrorKind::kSchema, std::string(key) + " must be a number");
      field = it->get<double>();
    }
  };
  read("lambda_b", base.mask_focal);
  read("lambda_d", base.mask_dice);
  read("lambda_c_s", base.class_subject);
  read("lambda_c_o", base.class_object);
  read("lambda_c_p", base.class_predicate);
  read("lambda_g", base.grounding);
  base.validate();
  return base;
}

/// Reads {"presets": {name: {lambda_*: ...}}} (or the bare name map) and
/// merges it over the built-in presets.
inline std::map<std::string, LossWeights> load_weight_presets(const std::string& path) {
  const Json root = parse_json_text(read_file(path), path);
  const Json& presets = root.contains("presets") ? root["presets"] : root;
  if (!presets.is_object()) fail(ErrorKind::kSchema, path + ": presets must be an object");
  auto out = builtin_weight_presets();
  for (const auto& [name, value] : presets.items()) {
    auto it = out.find(name);
    out[name] = weights_from_json(value, it != out.end() ? it->second : LossWeights{});
  }
  return out;
}

inline LossWeights weight_preset(const std::string& name,
                                 const std::map<std::string, LossWeights>& presets = builtin_weight_presets()) {
  auto it = presets.find(name);
  if (it == presets.end()) fail(ErrorKind::kInvalidArgument, "unknown weight preset '" + name + "'");
  return it->second;
}

struct CostOptions {
  FocalParams focal;
  /// Full cross-entropy classification terms instead of -p(target).
  bool full_ce = false;
};

/// Per-term breakdown of a matching cost (unweighted).
struct CostTerms {
  double focal_subject = 0, focal_object = 0;
  double dice_subject = 0, dice_object = 0;
  double class_subject = 0, class_object = 0, class_predicate = 0;

  double weighted(const LossWeights& w) const {
    return w.mask_focal * (focal_subject + focal_object) + w.mask_dice * (dice_subject + dice_object) +
           w.class_subject * class_subject + w.class_object * class_object +
           w.class_predicate * class_predicate;
  }
};

namespace detail {

inline const RleMask& require_mask(const std::optional<RleMask>& m, const char* what) {
  if (!m) fail(ErrorKind::kConstraint, std::string("matching needs a ") + what + " mask");
  return *m;
}

inline double class_cost(std::span<const double> scores, int target, bool full_ce) {
  if (full_ce) return ce_loss(scores, target);
  if (target < 0 || static_cast<std::size_t>(target) >= scores.size()) {
    fail(ErrorKind::kInvalidArgument, "class id outside score vector");
  }
  return -scores[target];
}

inline double predicate_cost(std::span<const double> scores, std::span<const int> targets, bool full_ce) {
  if (full_ce) return ce_loss(scores, targets);
  double sum = 0.0;
  for (int t : targets) {
    if (t < 0 || static_cast<std::size_t>(t) >= scores.size()) {
      fail(ErrorKind::kInvalidArgument, "predicate id outside score vector");
    }
    sum += scores[t];
  }
  return targets.empty() ? 0.0 : -sum / static_cast<double>(targets.size());
}

}  // namespace detail

inline CostTerms triplet_cost_terms(const PredTriplet& pred, const GtTriplet& gt, const CostOptions& options = {}) {
  CostTerms t;
  const RleMask& ps = detail::require_mask(pred.subject_mask, "predicted subject");
  const RleMask& gs = detail::require_mask(gt.subject.mask, "ground-truth subject");
  if (!ps.same_shape(gs)) fail(ErrorKind::kDimension, "prediction and ground truth differ in size");
  const RleMask po = pred.object_mask ? *pred.object_mask : RleMask::zeros(ps.height(), ps.width());
  const RleMask go = gt.object ? detail::require_mask(gt.object->mask, "ground-truth object")
                               : RleMask::zeros(ps.height(), ps.width());
  t.focal_subject = focal_loss(ps, gs, options.focal);
  t.focal_object = focal_loss(po, go, options.focal);
  t.dice_subject = dice_loss(ps, gs);
  t.dice_object = dice_loss(po, go);
  if (!pred.subject_scores.empty()) {
    t.class_subject = detail::class_cost(pred.subject_scores, gt.subject.category, options.full_ce);
  }
  if (gt.object) t.class_object = detail::class_cost(pred.object_scores, gt.object->category, options.full_ce);
  t.class_predicate = detail::predicate_cost(pred.predicate_scores, gt.predicates, options.full_ce);
  return t;
}

/// Weighted matching cost between one prediction and one ground truth.
inline double triplet_cost(const PredTriplet& pred, const GtTriplet& gt, const LossWeights& weights,
                           const CostOptions& options = {}) {
  weights.validate();
  return triplet_cost_terms(pred, gt, options).weighted(weights);
}

inline CostMatrix build_cost_matrix(const ImageRecord& rec, const LossWeights& weights,
                                    const CostOptions& options = {}, unsigned threads = 1) {
  weights.validate();
  CostMatrix m(rec.preds.size(), rec.gt.size());
  parallel_for(rec.preds.size(), threads, [&](std::size_t r) {
    for (std::size_t c = 0; c < rec.gt.size(); ++c) m(r, c) = triplet_cost(rec.preds[r], rec.gt[c], weights, options);
  });
  return m;
}

struct ImageMatch {
  std::string image_id;
  CostMatrix cost;
  Assignment assignment;
};

/// Hungarian matching of one image's predictions to its ground truth; an
/// image without ground truth yields an empty assignment.
inline ImageMatch match_image(const ImageRecord& rec, const LossWeights& weights, const CostOptions& options = {},
                              unsigned threads = 1) {
  ImageMatch out{rec.image_id, build_cost_matrix(rec, weights, options, threads), {}};
  out.assignment = hungarian_match(out.cost);
  return out;
}

inline Json to_json(const ImageMatch& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.cost.rows; ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cost.cols; ++c) row.push_back(m.cost(r, c));
    rows.push_back(std::move(row));
  }
  Json pairs = Json::array();
  for (const auto& [p, g] : m.assignment.pairs) pairs.push_back({p, g});
  return Json{{"image_id", m.image_id},
              {"cost", std::move(rows)},
              {"pairs", std::move(pairs)},
              {"total_cost", m.assignment.total_cost}};
}

}  // namespace vrs
