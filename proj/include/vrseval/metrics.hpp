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

// Evaluation protocols: triplet mAP (Full/Rare/Non-Rare), V-COCO role AP,
// scene-graph R@K / mR@K, prompt sIoU, and the box/mask transforms used for
// like-for-like comparisons.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vrseval/catalog.hpp"
#include "vrseval/dataset.hpp"
#include "vrseval/error.hpp"
#include "vrseval/json_io.hpp"
#include "vrseval/mask.hpp"
#include "vrseval/parallel.hpp"

namespace vrs {

enum class Localization { kBox, kMask };

inline const char* localization_name(Localization loc) { return loc == Localization::kBox ? "box" : "mask"; }

inline Localization parse_localization(const std::string& name) {
  if (name == "box") return Localization::kBox;
  if (name == "mask") return Localization::kMask;
  fail(ErrorKind::kInvalidArgument, "unknown localization '" + name + "' (expected box or mask)");
}

/// A detection is a true positive when both subject and object reach
/// `iou_threshold` (inclusive) and the categories agree.
struct TpRule {
  Localization localization = Localization::kMask;
  double iou_threshold = 0.5;

  void validate() const {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
      fail(ErrorKind::kInvalidArgument, "IoU threshold must lie in (0, 1]");
    }
  }
};

struct ReportRow {
  int id = 0;
  std::string name;
  std::int64_t num_gt = 0;
  std::map<std::string, double> values;
};

struct EvalReport {
  std::string protocol;
  TpRule rule;
  std::vector<ReportRow> rows;
  /// Null when the underlying set is empty.
  std::map<std::string, std::optional<double>> aggregates;
  std::map<std::string, std::int64_t> counts;
  std::vector<std::string> flags;

  std::optional<double> aggregate(const std::string& key) const {
    auto it = aggregates.find(key);
    return it == aggregates.end() ? std::nullopt : it->second;
  }
};

/// Mean of the values of `rows` at `key`, restricted to `ids` when given;
/// rows without the key are skipped.
inline std::optional<double> mean_of_rows(const std::vector<ReportRow>& rows, const std::string& key,
                                          const std::vector<int>* ids = nullptr) {
  std::vector<char> keep;
  if (ids) {
    int mx = 0;
    for (const auto& r : rows) mx = std::max(mx, r.id + 1);
    keep.assign(static_cast<std::size_t>(mx), 0);
    for (int id : *ids) {
      if (id >= 0 && id < mx) keep[id] = 1;
    }
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (ids && !keep[r.id]) continue;
    auto it = r.values.find(key);
    if (it == r.values.end()) continue;
    sum += it->second;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

inline Json to_json(const EvalReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(Json{{"id", row.id}, {"name", row.name}, {"num_gt", row.num_gt}, {"values", row.values}});
  }
  Json aggregates = Json::object();
  for (const auto& [k, v] : r.aggregates) aggregates[k] = v ? Json(*v) : Json(nullptr);
  return Json{{"protocol", r.protocol},
              {"rule", {{"localization", localization_name(r.rule.localization)},
                        {"iou_threshold", r.rule.iou_threshold}}},
              {"aggregates", std::move(aggregates)},
              {"counts", r.counts},
              {"rows", std::move(rows)},
              {"flags", r.flags}};
}

namespace detail {

inline std::string percent(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v * 100.0);
  return buf;
}

inline std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace detail

/// Plain-text table: Full/Rare/Non-Rare columns for mAP, R/mR rows per K.
inline std::string summary_table(const EvalReport& r) {
  std::ostringstream out;
  char thr[32];
  std::snprintf(thr, sizeof thr, "%.2f", r.rule.iou_threshold);
  out << r.protocol << " (" << localization_name(r.rule.localization) << ", IoU >= " << thr << ")\n";
  if (r.protocol == "hoi_map") {
    out << detail::pad("", 8) << detail::pad("Full", 10) << detail::pad("Rare", 10) << detail::pad("Non-Rare", 10)
        << "\n";
    out << detail::pad("mAP", 8) << detail::pad(detail::percent(r.aggregate("mAP_full")), 10)
        << detail::pad(detail::percent(r.aggregate("mAP_rare")), 10)
        << detail::pad(detail::percent(r.aggregate("mAP_non_rare")), 10) << "\n";
  } else if (r.protocol == "psg_recall") {
    std::vector<int> ks;
    for (const auto& [k, v] : r.aggregates) {
      if (k.rfind("R@", 0) == 0) ks.push_back(std::stoi(k.substr(2)));
    }
    std::sort(ks.begin(), ks.end());
    out << detail::pad("", 8);
    for (int k : ks) out << detail::pad("@" + std::to_string(k), 10);
    out << "\n";
    for (const char* m : {"R", "mR"}) {
      out << detail::pad(m, 8);
      for (int k : ks) out << detail::pad(detail::percent(r.aggregate(std::string(m) + "@" + std::to_string(k))), 10);
      out << "\n";
    }
  } else {
    for (const auto& [k, v] : r.aggregates) out << detail::pad(k, 14) << detail::pad(detail::percent(v), 10) << "\n";
  }
  for (const auto& f : r.flags) out << "note: " << f << "\n";
  return out.str();
}

/// Subject term used by the HOI protocols: the person probability, or 1
/// when the subject head is omitted.
inline double subject_term(const PredTriplet& pred, const CategoryCatalog& catalog) {
  if (pred.subject_scores.empty()) return 1.0;
  const int s = catalog.subject_category;
  if (s < 0 || static_cast<std::size_t>(s) >= pred.subject_scores.size()) {
    fail(ErrorKind::kInvalidArgument, "subject category outside subject score vector");
  }
  return pred.subject_scores[s];
}

/// Confidence of a prediction for one relation class.
inline double score_triplet(const PredTriplet& pred, const RelationClass& rc, const CategoryCatalog& catalog) {
  if (rc.object_id < 0 || static_cast<std::size_t>(rc.object_id) >= pred.object_scores.size()) {
    fail(ErrorKind::kInvalidArgument, "object id " + std::to_string(rc.object_id) + " outside object scores");
  }
  if (rc.predicate_id < 0 || static_cast<std::size_t>(rc.predicate_id) >= pred.predicate_scores.size()) {
    fail(ErrorKind::kInvalidArgument,
         "predicate id " + std::to_string(rc.predicate_id) + " outside predicate scores");
  }
  return subject_term(pred, catalog) * pred.object_scores[rc.object_id] * pred.predicate_scores[rc.predicate_id];
}

/// All-point interpolated AP of detections given in rank order (true for a
/// true positive) against `npos` ground-truth instances.
inline std::optional<double> average_precision(const std::vector<char>& tp_in_rank_order, std::int64_t npos) {
  if (npos <= 0) return std::nullopt;
  const std::size_t n = tp_in_rank_order.size();
  std::vector<double> prec(n), rec(n);
  double tp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (tp_in_rank_order[i]) tp += 1.0;
    prec[i] = tp / static_cast<double>(i + 1);
    rec[i] = tp / static_cast<double>(npos);
  }
  for (std::size_t i = n; i-- > 1;) prec[i - 1] = std::max(prec[i - 1], prec[i]);
  double ap = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ap += (rec[i] - prev) * prec[i];
    prev = rec[i];
  }
  return ap;
}

namespace detail {

/// Lazily computed subject/object IoUs between an image's predictions and
/// its ground truth under one TP rule.
class PairIou {
 public:
  PairIou(const ImageRecord& rec, const TpRule& rule)
      : rec_(rec),
        rule_(rule),
        sub_(rec.preds.size() * rec.gt.size(), -1.0),
        obj_(rec.preds.size() * rec.gt.size(), -1.0) {}

  double subject(std::size_t i, std::size_t j) {
    double& v = sub_[i * rec_.gt.size() + j];
    if (v < 0.0) v = iou(rec_.preds[i].subject_mask, rec_.preds[i].subject_box, rec_.gt[j].subject);
    return v;
  }

  /// Ground truth j must have an object.
  double object(std::size_t i, std::size_t j) {
    double& v = obj_[i * rec_.gt.size() + j];
    if (v < 0.0) v = iou(rec_.preds[i].object_mask, rec_.preds[i].object_box, *rec_.gt[j].object);
    return v;
  }

 private:
  double iou(const std::optional<RleMask>& pm, const std::optional<BBox>& pb, const Entity& g) const {
    if (rule_.localization == Localization::kMask) {
      if (!g.mask) fail(ErrorKind::kConstraint, "image " + rec_.image_id + ": mask rule needs ground-truth masks");
      if (!pm) {
        if (pb) {
          fail(ErrorKind::kConstraint,
               "image " + rec_.image_id + ": mask rule with a box-only prediction; convert boxes to masks first");
        }
        return 0.0;
      }
      return mask_iou(*pm, *g.mask);
    }
    std::optional<BBox> p = pb;
    if (!p && pm && !pm->empty()) p = mask_to_box(*pm);
    std::optional<BBox> t = g.box;
    if (!t && g.mask && !g.mask->empty()) t = mask_to_box(*g.mask);
    if (!p || !t) return 0.0;
    return box_iou(*p, *t);
  }

  const ImageRecord& rec_;
  TpRule rule_;
  std::vector<double> sub_;
  std::vector<double> obj_;
};

struct Candidate {
  double conf;
  std::uint32_t pred;
  std::uint32_t cls;
};

/// Sorts by confidence descending, then prediction index, then class; keeps
/// the first `top_k` (0 keeps all).
inline void select_top(std::vector<Candidate>& c, std::size_t top_k) {
  auto before = [](const Candidate& a, const Candidate& b) {
    if (a.conf != b.conf) return a.conf > b.conf;
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.cls < b.cls;
  };
  if (top_k > 0 && top_k < c.size()) {
    std::partial_sort(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(top_k), c.end(), before);
    c.resize(top_k);
  } else {
    std::sort(c.begin(), c.end(), before);
  }
}

struct Detection {
  double conf;
  std::uint32_t image;
  std::uint32_t pred;
  bool tp;
};

/// Per-class evaluation output of one image.
struct ImageDetections {
  std::vector<std::pair<std::uint32_t, Detection>> dets;  // (class, detection)
  std::vector<std::pair<std::uint32_t, std::int64_t>> npos;  // (class, count)
};

/// Greedy matching inside one image. `gt_of_class[c]` lists ground-truth
/// indices of class c; `match_value(pred, gt)` returns the quality of a
/// correct match or nullopt when the rule fails.
template <typename MatchValue>
ImageDetections match_in_image(std::uint32_t image, std::vector<Candidate> selected,
                               const std::map<std::uint32_t, std::vector<std::size_t>>& gt_of_class,
                               MatchValue&& match_value) {
  ImageDetections out;
  for (const auto& [c, gts] : gt_of_class) out.npos.emplace_back(c, static_cast<std::int64_t>(gts.size()));
  std::stable_sort(selected.begin(), selected.end(),
                   [](const Candidate& a, const Candidate& b) { return a.cls < b.cls; });
  std::size_t i = 0;
  while (i < selected.size()) {
    const std::uint32_t cls = selected[i].cls;
    std::size_t end = i;
    while (end < selected.size() && selected[end].cls == cls) ++end;
    auto it = gt_of_class.find(cls);
    std::vector<char> used(it == gt_of_class.end() ? 0 : it->second.size(), 0);
    for (; i < end; ++i) {
      const Candidate& c = selected[i];
      bool tp = false;
      if (it != gt_of_class.end()) {
        double best = -1.0;
        std::size_t best_k = 0;
        for (std::size_t k = 0; k < it->second.size(); ++k) {
          if (used[k]) continue;
          if (auto v = match_value(c.pred, c.cls, it->second[k]); v && *v > best) {
            best = *v;
            best_k = k;
          }
        }
        if (best >= 0.0) {
          used[best_k] = 1;
          tp = true;
        }
      }
      out.dets.emplace_back(cls, Detection{c.conf, image, c.pred, tp});
    }
  }
  return out;
}

/// Reduces per-image detections into per-class AP values (nullopt for
/// classes without ground truth).
inline std::vector<std::optional<double>> reduce_ap(std::vector<ImageDetections>& per_image, std::size_t num_classes,
                                                    std::vector<std::int64_t>& npos, unsigned threads) {
  std::vector<std::vector<Detection>> by_class(num_classes);
  npos.assign(num_classes, 0);
  for (auto& img : per_image) {
    for (const auto& [c, n] : img.npos) npos[c] += n;
    for (const auto& [c, d] : img.dets) by_class[c].push_back(d);
    img = {};
  }
  std::vector<std::optional<double>> ap(num_classes);
  parallel_for(num_classes, threads, [&](std::size_t c) {
    auto& dets = by_class[c];
    std::sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
      if (a.conf != b.conf) return a.conf > b.conf;
      if (a.image != b.image) return a.image < b.image;
      return a.pred < b.pred;
    });
    std::vector<char> tp(dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i) tp[i] = dets[i].tp ? 1 : 0;
    ap[c] = average_precision(tp, npos[c]);
    dets = {};
  });
  return ap;
}

inline void require_nonempty(const Dataset& ds) {
  if (ds.images.empty()) fail(ErrorKind::kInvalidArgument, "dataset has no images");
}

inline std::optional<double> match_quality(double sub, std::optional<double> obj, double thr) {
  if (sub < thr) return std::nullopt;
  if (!obj) return sub;
  if (*obj < thr) return std::nullopt;
  return std::min(sub, *obj);
}

}  // namespace detail

struct HoiMapOptions {
  /// Candidates kept per image after expansion over relation classes; 0 keeps all.
  std::size_t top_k = 100;
  /// Rare/Non-Rare sets; derived from catalog training counts when absent.
  std::optional<RarePartition> partition;
  unsigned threads = 0;
};

/// Triplet mAP over the catalog's relation classes.
inline EvalReport eval_hoi_map(const Dataset& ds, const TpRule& rule, const HoiMapOptions& options = {}) {
  rule.validate();
  detail::require_nonempty(ds);
  const CategoryCatalog& cat = ds.catalog;
  const std::size_t num_rel = cat.relations.size();
  std::vector<detail::ImageDetections> per_image(ds.images.size());
  parallel_for(ds.images.size(), options.threads, [&](std::size_t im) {
    const ImageRecord& rec = ds.images[im];
    std::map<std::uint32_t, std::vector<std::size_t>> gt_of_class;
    for (std::size_t j = 0; j < rec.gt.size(); ++j) {
      const GtTriplet& t = rec.gt[j];
      if (!t.object) continue;
      for (int p : t.predicates) {
        if (auto r = cat.relation_index(t.object->category, p)) gt_of_class[static_cast<std::uint32_t>(*r)].push_back(j);
      }
    }
    std::vector<detail::Candidate> cands;
    cands.reserve(rec.preds.size() * num_rel);
    for (std::size_t i = 0; i < rec.preds.size(); ++i) {
      const PredTriplet& p = rec.preds[i];
      const double s = subject_term(p, cat);
      for (std::size_t r = 0; r < num_rel; ++r) {
        const RelationClass& rc = cat.relations[r];
        cands.push_back({s * p.object_scores.at(rc.object_id) * p.predicate_scores.at(rc.predicate_id),
                         static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(r)});
      }
    }
    detail::select_top(cands, options.top_k);
    detail::PairIou iou(rec, rule);
    per_image[im] = detail::match_in_image(
        static_cast<std::uint32_t>(im), std::move(cands), gt_of_class,
        [&](std::uint32_t i, std::uint32_t, std::size_t j) {
          return detail::match_quality(iou.subject(i, j), iou.object(i, j), rule.iou_threshold);
        });
  });
  std::vector<std::int64_t> npos;
  const auto ap = detail::reduce_ap(per_image, num_rel, npos, options.threads);

  EvalReport report;
  report.protocol = "hoi_map";
  report.rule = rule;
  std::int64_t total_gt = 0;
  for (std::size_t r = 0; r < num_rel; ++r) {
    ReportRow row;
    row.id = static_cast<int>(r);
    const RelationClass& rc = cat.relations[r];
    row.name = cat.predicate_names[rc.predicate_id] + " " + cat.object_names[rc.object_id];
    row.num_gt = npos[r];
    total_gt += npos[r];
    if (ap[r]) row.values["AP"] = *ap[r];
    report.rows.push_back(std::move(row));
  }
  if (total_gt == 0) fail(ErrorKind::kConstraint, "no ground truth in any relation class");
  report.aggregates["mAP_full"] = mean_of_rows(report.rows, "AP");
  std::optional<RarePartition> part = options.partition;
  if (!part && cat.train_counts) part = rare_partition(cat);
  if (part) {
    report.aggregates["mAP_rare"] = mean_of_rows(report.rows, "AP", &part->rare);
    report.aggregates["mAP_non_rare"] = mean_of_rows(report.rows, "AP", &part->non_rare);
  } else {
    report.aggregates["mAP_rare"] = std::nullopt;
    report.aggregates["mAP_non_rare"] = std::nullopt;
    report.flags.push_back("no training counts: Rare/Non-Rare not reported");
  }
  std::int64_t evaluated = 0;
  for (const auto& row : report.rows) evaluated += row.values.count("AP");
  report.counts["num_images"] = static_cast<std::int64_t>(ds.images.size());
  report.counts["num_gt"] = total_gt;
  report.counts["num_classes_evaluated"] = evaluated;
  return report;
}

enum class VcocoScenario { kS1, kS2 };

inline VcocoScenario parse_vcoco_scenario(const std::string& s) {
  if (s == "S1" || s == "s1" || s == "1") return VcocoScenario::kS1;
  if (s == "S2" || s == "s2" || s == "2") return VcocoScenario::kS2;
  fail(ErrorKind::kInvalidArgument, "unknown scenario '" + s + "' (expected S1 or S2)");
}

struct VcocoOptions {
  VcocoScenario scenario = VcocoScenario::kS1;
  /// Candidates kept per image; 0 keeps all.
  std::size_t top_k = 0;
  unsigned threads = 0;
};

/// Per-action role AP. Confidence is subject term x action probability.
inline EvalReport eval_vcoco_role_ap(const Dataset& ds, const TpRule& rule, const VcocoOptions& options = {}) {
  rule.validate();
  detail::require_nonempty(ds);
  const CategoryCatalog& cat = ds.catalog;
  if (!cat.no_object_predicates) {
    fail(ErrorKind::kConstraint, "role AP needs a catalog that marks no-object actions");
  }
  const bool s1 = options.scenario == VcocoScenario::kS1;
  std::vector<std::uint32_t> actions;
  for (int a = 0; a < cat.num_predicates(); ++a) {
    if (s1 || !cat.is_no_object_predicate(a)) actions.push_back(static_cast<std::uint32_t>(a));
  }
  std::vector<char> evaluated(static_cast<std::size_t>(cat.num_predicates()), 0);
  for (auto a : actions) evaluated[a] = 1;

  std::vector<detail::ImageDetections> per_image(ds.images.size());
  parallel_for(ds.images.size(), options.threads, [&](std::size_t im) {
    const ImageRecord& rec = ds.images[im];
    std::map<std::uint32_t, std::vector<std::size_t>> gt_of_class;
    for (std::size_t j = 0; j < rec.gt.size(); ++j) {
      for (int p : rec.gt[j].predicates) {
        if (evaluated[p]) gt_of_class[static_cast<std::uint32_t>(p)].push_back(j);
      }
    }
    std::vector<detail::Candidate> cands;
    cands.reserve(rec.preds.size() * actions.size());
    for (std::size_t i = 0; i < rec.preds.size(); ++i) {
      const PredTriplet& p = rec.preds[i];
      const double s = subject_term(p, cat);
      for (auto a : actions) cands.push_back({s * p.predicate_scores.at(a), static_cast<std::uint32_t>(i), a});
    }
    detail::select_top(cands, options.top_k);
    detail::PairIou iou(rec, rule);
    per_image[im] = detail::match_in_image(
        static_cast<std::uint32_t>(im), std::move(cands), gt_of_class,
        [&](std::uint32_t i, std::uint32_t, std::size_t j) -> std::optional<double> {
          const double sub = iou.subject(i, j);
          if (!rec.gt[j].object) {
            // No-object role: the object is correct only when none is declared.
            if (rec.preds[i].declares_object()) return std::nullopt;
            return detail::match_quality(sub, std::nullopt, rule.iou_threshold);
          }
          return detail::match_quality(sub, iou.object(i, j), rule.iou_threshold);
        });
  });
  std::vector<std::int64_t> npos;
  const auto ap = detail::reduce_ap(per_image, static_cast<std::size_t>(cat.num_predicates()), npos, options.threads);

  EvalReport report;
  report.protocol = "vcoco_role_ap";
  report.rule = rule;
  std::int64_t total_gt = 0;
  for (auto a : actions) {
    ReportRow row;
    row.id = static_cast<int>(a);
    row.name = cat.predicate_names[a];
    row.num_gt = npos[a];
    total_gt += npos[a];
    if (ap[a]) row.values["AP"] = *ap[a];
    report.rows.push_back(std::move(row));
  }
  if (total_gt == 0) fail(ErrorKind::kConstraint, "no ground truth for the evaluated actions");
  report.aggregates[s1 ? "AP_role_S1" : "AP_role_S2"] = mean_of_rows(report.rows, "AP");
  if (s1) report.flags.push_back("no-object actions use the vacuous object match");
  report.counts["num_images"] = static_cast<std::int64_t>(ds.images.size());
  report.counts["num_gt"] = total_gt;
  report.counts["num_actions"] = static_cast<std::int64_t>(actions.size());
  return report;
}

struct PsgRecallOptions {
  std::vector<int> ks{20, 50, 100};
  unsigned threads = 0;
};

inline int argmax(const std::vector<double>& v) {
  if (v.empty()) fail(ErrorKind::kConstraint, "argmax of an empty score vector");
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

/// Triplet recall and mean per-predicate recall over the top-K triplets of
/// each image. Entity labels are the argmax of the class heads; each
/// prediction is expanded over predicates.
inline EvalReport eval_psg_recall(const Dataset& ds, const TpRule& rule, const PsgRecallOptions& options = {}) {
  rule.validate();
  detail::require_nonempty(ds);
  if (options.ks.empty()) fail(ErrorKind::kInvalidArgument, "no K values given");
  for (int k : options.ks) {
    if (k <= 0) fail(ErrorKind::kInvalidArgument, "K must be positive, got " + std::to_string(k));
  }
  std::vector<int> ks = options.ks;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  const std::size_t max_k = static_cast<std::size_t>(ks.back());
  const CategoryCatalog& cat = ds.catalog;
  const std::size_t np = static_cast<std::size_t>(cat.num_predicates());

  // recalled[im][p * ks + k], totals[im][p]
  std::vector<std::vector<std::int64_t>> recalled(ds.images.size()), totals(ds.images.size());
  parallel_for(ds.images.size(), options.threads, [&](std::size_t im) {
    const ImageRecord& rec = ds.images[im];
    std::vector<std::int64_t> rc(np * ks.size(), 0), tot(np, 0);
    std::vector<int> sl(rec.preds.size()), ol(rec.preds.size());
    std::vector<detail::Candidate> cands;
    cands.reserve(rec.preds.size() * np);
    for (std::size_t i = 0; i < rec.preds.size(); ++i) {
      const PredTriplet& p = rec.preds[i];
      if (p.subject_scores.empty()) fail(ErrorKind::kConstraint, "image " + rec.image_id + ": recall needs subject scores");
      sl[i] = argmax(p.subject_scores);
      ol[i] = argmax(p.object_scores);
      const double so = p.subject_scores[sl[i]] * p.object_scores[ol[i]];
      for (std::size_t q = 0; q < np; ++q) {
        cands.push_back({so * p.predicate_scores[q], static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(q)});
      }
    }
    detail::select_top(cands, max_k);
    detail::PairIou iou(rec, rule);
    for (std::size_t j = 0; j < rec.gt.size(); ++j) {
      const GtTriplet& t = rec.gt[j];
      if (!t.object) fail(ErrorKind::kConstraint, "image " + rec.image_id + ": recall needs an object per triplet");
      for (int p : t.predicates) {
        ++tot[p];
        std::size_t first = std::numeric_limits<std::size_t>::max();
        for (std::size_t r = 0; r < cands.size(); ++r) {
          const auto& c = cands[r];
          if (static_cast<int>(c.cls) != p || sl[c.pred] != t.subject.category || ol[c.pred] != t.object->category) {
            continue;
          }
          if (iou.subject(c.pred, j) >= rule.iou_threshold && iou.object(c.pred, j) >= rule.iou_threshold) {
            first = r;
            break;
          }
        }
        for (std::size_t k = 0; k < ks.size(); ++k) {
          if (first < static_cast<std::size_t>(ks[k])) ++rc[static_cast<std::size_t>(p) * ks.size() + k];
        }
      }
    }
    recalled[im] = std::move(rc);
    totals[im] = std::move(tot);
  });

  std::vector<std::int64_t> rc(np * ks.size(), 0), tot(np, 0);
  for (std::size_t im = 0; im < ds.images.size(); ++im) {
    for (std::size_t i = 0; i < rc.size(); ++i) rc[i] += recalled[im][i];
    for (std::size_t i = 0; i < np; ++i) tot[i] += totals[im][i];
  }
  EvalReport report;
  report.protocol = "psg_recall";
  report.rule = rule;
  std::int64_t total_gt = 0;
  for (std::size_t p = 0; p < np; ++p) {
    ReportRow row;
    row.id = static_cast<int>(p);
    row.name = cat.predicate_names[p];
    row.num_gt = tot[p];
    total_gt += tot[p];
    if (tot[p] > 0) {
      for (std::size_t k = 0; k < ks.size(); ++k) {
        row.values["R@" + std::to_string(ks[k])] =
            static_cast<double>(rc[p * ks.size() + k]) / static_cast<double>(tot[p]);
      }
    }
    report.rows.push_back(std::move(row));
  }
  for (std::size_t k = 0; k < ks.size(); ++k) {
    const std::string key = "R@" + std::to_string(ks[k]);
    std::int64_t hit = 0;
    for (std::size_t p = 0; p < np; ++p) hit += rc[p * ks.size() + k];
    report.aggregates[key] =
        total_gt > 0 ? std::optional<double>(static_cast<double>(hit) / static_cast<double>(total_gt)) : std::nullopt;
    report.aggregates["mR@" + std::to_string(ks[k])] = mean_of_rows(report.rows, key);
  }
  if (total_gt == 0) report.flags.push_back("no ground truth triplets");
  report.counts["num_images"] = static_cast<std::int64_t>(ds.images.size());
  report.counts["num_gt"] = total_gt;
  return report;
}

/// Mean subject and object IoU of one prompted prediction per image against
/// the image's first ground-truth pair. Images without ground truth are
/// skipped; images without a prediction count as IoU 0 and are flagged.
inline EvalReport eval_siou(const Dataset& ds, Localization localization = Localization::kMask) {
  detail::require_nonempty(ds);
  const TpRule rule{localization, 0.5};
  EvalReport report;
  report.protocol = "siou";
  report.rule = rule;
  double s_sum = 0.0, o_sum = 0.0;
  std::int64_t n = 0, missing = 0, skipped = 0;
  for (std::size_t im = 0; im < ds.images.size(); ++im) {
    const ImageRecord& rec = ds.images[im];
    if (rec.gt.empty()) {
      ++skipped;
      continue;
    }
    ReportRow row;
    row.id = static_cast<int>(im);
    row.name = rec.image_id;
    row.num_gt = 1;
    double s = 0.0, o = 0.0;
    if (rec.preds.empty()) {
      ++missing;
      report.flags.push_back("missing prediction for image " + rec.image_id);
    } else {
      detail::PairIou iou(rec, rule);
      s = iou.subject(0, 0);
      if (rec.gt[0].object) {
        o = iou.object(0, 0);
      } else {
        o = rec.preds[0].declares_object() ? 0.0 : 1.0;
      }
    }
    row.values["S-IoU"] = s;
    row.values["O-IoU"] = o;
    s_sum += s;
    o_sum += o;
    ++n;
    report.rows.push_back(std::move(row));
  }
  report.aggregates["S-IoU"] = n ? std::optional<double>(s_sum / static_cast<double>(n)) : std::nullopt;
  report.aggregates["O-IoU"] = n ? std::optional<double>(o_sum / static_cast<double>(n)) : std::nullopt;
  report.counts["num_images"] = n;
  report.counts["num_missing"] = missing;
  report.counts["num_skipped"] = skipped;
  return report;
}

enum class FairnessDirection { kMaskToBox, kBoxToMask };

/// Supplies a mask for a predicted box (subject when `subject` is true).
using ExternalMaskFn = std::function<std::optional<RleMask>(const ImageRecord& rec, std::size_t pred_index,
                                                            bool subject, const BBox& box)>;

/// Rasterizes each box as a filled rectangle.
inline ExternalMaskFn box_fill_masks() {
  return [](const ImageRecord& rec, std::size_t, bool, const BBox& box) -> std::optional<RleMask> {
    return box_to_mask(box, rec.height, rec.width);
  };
}

struct TransformError {
  std::string image_id;
  std::size_t pred_index = 0;
  std::string message;
};

struct TransformResult {
  Dataset dataset;
  /// Failed predictions are removed from the dataset and listed here.
  std::vector<TransformError> errors;
};

/// Replaces every prediction's localization: masks by their tight boxes, or
/// boxes by externally supplied masks. Scores are untouched.
inline TransformResult transform_for_fairness(const Dataset& ds, FairnessDirection direction,
                                              const ExternalMaskFn& masks = {}) {
  if (direction == FairnessDirection::kBoxToMask && !masks) {
    fail(ErrorKind::kInvalidArgument, "box to mask transform needs a mask source");
  }
  TransformResult out;
  out.dataset.catalog = ds.catalog;
  for (const ImageRecord& rec : ds.images) {
    ImageRecord nr = rec;
    nr.preds.clear();
    for (std::size_t i = 0; i < rec.preds.size(); ++i) {
      PredTriplet p = rec.preds[i];
      std::string error;
      if (direction == FairnessDirection::kMaskToBox) {
        if (p.subject_mask) {
          if (p.subject_mask->empty()) {
            error = "empty subject mask";
          } else {
            p.subject_box = mask_to_box(*p.subject_mask);
          }
          p.subject_mask.reset();
        }
        if (p.object_mask) {
          if (p.object_mask->empty()) {
            p.object_box.reset();
          } else {
            p.object_box = mask_to_box(*p.object_mask);
          }
          p.object_mask.reset();
        }
      } else {
        auto convert = [&](std::optional<BBox>& box, std::optional<RleMask>& mask, bool subject) {
          if (!box || !error.empty()) return;
          auto m = masks(rec, i, subject, *box);
          if (!m) {
            error = std::string("no external mask for the ") + (subject ? "subject" : "object") + " box";
          } else if (m->height() != rec.height || m->width() != rec.width) {
            error = "external mask size differs from the image";
          } else {
            mask = std::move(*m);
            box.reset();
          }
        };
        convert(p.subject_box, p.subject_mask, true);
        convert(p.object_box, p.object_mask, false);
      }
      if (error.empty()) {
        nr.preds.push_back(std::move(p));
      } else {
        out.errors.push_back({rec.image_id, i, error});
      }
    }
    out.dataset.images.push_back(std::move(nr));
  }
  return out;
}

}  // namespace vrs
