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

// Attaching externally generated masks (e.g. a promptable segmenter run on the
// annotated boxes) to box annotations.
//
// Per image:
//   1. every candidate is scored against its source box and rejected when
//      the score is below the filter threshold;
//   2. of the survivors for one box, the highest-scoring candidate wins;
//   3. winning masks of the same category are deduplicated greedily in
//      box-id order; a suppressed box shares the mask that suppressed it;
//   4. triplets whose subject or object ends up without a mask are dropped.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "vrseval/dataset.hpp"
#include "vrseval/io.hpp"
#include "vrseval/json_io.hpp"
#include "vrseval/mask.hpp"
#include "vrseval/parallel.hpp"

namespace vrs {

enum class FilterIouMode {
  /// IoU between the source box and the tight box of the mask.
  kBoxVsMaskBox,
  /// IoU between the rasterized source box and the mask pixels.
  kBoxRegionVsMask,
};

struct IngestOptions {
  double filter_threshold = 0.2;
  double dedup_threshold = 0.1;
  FilterIouMode mode = FilterIouMode::kBoxVsMaskBox;
  unsigned threads = 1;
};

struct MaskCandidate {
  BBox source_box;
  RleMask mask;
  double box_mask_iou = 0.0;
};

inline double box_mask_score(const BBox& box, const RleMask& mask, FilterIouMode mode) {
  if (mask.empty()) return 0.0;
  if (mode == FilterIouMode::kBoxVsMaskBox) return box_iou(box, mask_to_box(mask));
  return mask_iou(box_to_mask(box, mask.height(), mask.width()), mask);
}

inline MaskCandidate make_candidate(const BBox& box, RleMask mask, FilterIouMode mode) {
  const double iou = box_mask_score(box, mask, mode);
  return MaskCandidate{box, std::move(mask), iou};
}

/// One externally produced mask keyed by (image_id, box_id).
struct CandidateRecord {
  std::string image_id;
  int box_id = 0;
  RleMask mask;
};

inline std::vector<CandidateRecord> load_candidates(const std::string& path) {
  std::vector<CandidateRecord> out;
  detail::for_each_jsonl(path, [&](const Json& j, const std::string&) {
    CandidateRecord c;
    c.image_id = image_id_from_json(detail::require(j, "image_id"));
    const Json* key = nullptr;
    if (auto it = j.find("box_id"); it != j.end()) key = &*it;
    if (!key) key = &detail::require(j, "box_index");
    c.box_id = detail::as_int(*key, "box_id");
    c.mask = rle_from_json(detail::require(j, "mask"));
    out.push_back(std::move(c));
  });
  return out;
}

namespace ingest_reason {
inline constexpr const char* kBelowThreshold = "below_threshold";
inline constexpr const char* kSuperseded = "superseded";
inline constexpr const char* kDuplicate = "duplicate";
inline constexpr const char* kNoMask = "no mask";
inline constexpr const char* kUnknownBox = "unknown_box";
}  // namespace ingest_reason

struct CandidateRejection {
  std::string image_id;
  int box_id = 0;
  std::size_t candidate = 0;  // position of the candidate in the input
  std::string reason;
  double iou = 0.0;
};

struct DroppedTriplet {
  std::string image_id;
  std::size_t triplet = 0;  // index in the input record
  std::string reason;
};

struct IngestReport {
  std::size_t total_candidates = 0;
  std::vector<CandidateRejection> rejections;
  std::vector<DroppedTriplet> dropped_triplets;

  std::size_t retained() const { return total_candidates - rejections.size(); }

  std::map<std::string, std::size_t> reason_counts() const {
    std::map<std::string, std::size_t> out;
    for (const auto& r : rejections) ++out[r.reason];
    for (const auto& d : dropped_triplets) ++out[d.reason];
    return out;
  }
};

/// retained / total candidates.
inline double retention_rate(const IngestReport& report) {
  if (report.total_candidates == 0) {
    fail(ErrorKind::kConstraint, "retention rate is undefined without candidates");
  }
  return static_cast<double>(report.retained()) / static_cast<double>(report.total_candidates);
}

inline Json to_json(const IngestReport& report) {
  Json rejections = Json::array();
  for (const auto& r : report.rejections) {
    rejections.push_back({{"image_id", r.image_id}, {"box_id", r.box_id}, {"candidate", r.candidate},
                          {"reason", r.reason}, {"iou", r.iou}});
  }
  Json dropped = Json::array();
  for (const auto& d : report.dropped_triplets) {
    dropped.push_back({{"image_id", d.image_id}, {"triplet", d.triplet}, {"reason", d.reason}});
  }
  Json j{{"total_candidates", report.total_candidates},
         {"retained", report.retained()},
         {"reason_counts", report.reason_counts()},
         {"rejections", std::move(rejections)},
         {"dropped_triplets", std::move(dropped)}};
  j["retention_rate"] = report.total_candidates ? Json(retention_rate(report)) : Json(nullptr);
  return j;
}

struct IngestResult {
  Dataset dataset;
  IngestReport report;
};

namespace detail {

struct BoxSlot {
  BBox box;
  int category = 0;
  std::vector<std::size_t> candidates;  // indices into the global candidate list
  std::optional<std::size_t> winner;
  std::optional<RleMask> mask;
};

/// Gives every boxed entity a box_id: existing ids are kept, the rest are
/// numbered after them by first appearance of each distinct box.
inline void assign_box_ids(ImageRecord& rec) {
  int next = 0;
  for (const auto& t : rec.gt) {
    for (const Entity* e : {&t.subject, t.object ? &*t.object : nullptr}) {
      if (e && e->box_id) next = std::max(next, *e->box_id + 1);
    }
  }
  std::vector<std::pair<BBox, int>> assigned;
  for (auto& t : rec.gt) {
    for (Entity* e : {&t.subject, t.object ? &*t.object : nullptr}) {
      if (!e || e->box_id || !e->box) continue;
      auto it = std::find_if(assigned.begin(), assigned.end(), [&](const auto& a) {
        return a.first == *e->box;
      });
      if (it != assigned.end()) {
        e->box_id = it->second;
      } else {
        assigned.emplace_back(*e->box, next);
        e->box_id = next++;
      }
    }
  }
}

}  // namespace detail

/// Attaches candidate masks to the boxes of `gt`. Entities that already
/// carry a mask and receive no accepted candidate keep their mask.
inline IngestResult attach_masks(Dataset gt, const std::vector<CandidateRecord>& candidates,
                                 const IngestOptions& options = {}) {
  if (!(options.filter_threshold >= 0.0 && options.filter_threshold <= 1.0)) {
    fail(ErrorKind::kInvalidArgument, "filter threshold must lie in [0, 1]");
  }
  if (!(options.dedup_threshold > 0.0 && options.dedup_threshold <= 1.0)) {
    fail(ErrorKind::kInvalidArgument, "dedup threshold must lie in (0, 1]");
  }
  const auto index = gt.index();
  std::vector<std::vector<std::size_t>> per_image(gt.images.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto it = index.find(candidates[i].image_id);
    if (it == index.end()) {
      fail(ErrorKind::kReference, "candidate " + std::to_string(i) + " references unknown image_id '" +
                                      candidates[i].image_id + "'");
    }
    per_image[it->second].push_back(i);
  }

  struct ImageOutcome {
    std::vector<CandidateRejection> rejections;
    std::vector<DroppedTriplet> dropped;
  };
  std::vector<ImageOutcome> outcomes(gt.images.size());

  parallel_for(gt.images.size(), options.threads, [&](std::size_t img) {
    ImageRecord& rec = gt.images[img];
    ImageOutcome& out = outcomes[img];
    detail::assign_box_ids(rec);

    std::map<int, detail::BoxSlot> slots;
    for (const auto& t : rec.gt) {
      for (const Entity* e : {&t.subject, t.object ? &*t.object : nullptr}) {
        if (!e || !e->box_id || !e->box) continue;
        auto [it, inserted] = slots.try_emplace(*e->box_id);
        if (inserted) {
          it->second.box = *e->box;
          it->second.category = e->category;
        } else if (!(it->second.box == *e->box)) {
          fail(ErrorKind::kSchema, "image " + rec.image_id + ": box_id " + std::to_string(*e->box_id) +
                                       " names two different boxes");
        }
      }
    }

    // Filter, then keep the best survivor per box.
    for (std::size_t ci : per_image[img]) {
      const CandidateRecord& c = candidates[ci];
      auto it = slots.find(c.box_id);
      if (c.mask.height() != rec.height || c.mask.width() != rec.width) {
        fail(ErrorKind::kDimension, "candidate " + std::to_string(ci) + " mask is " +
                                        std::to_string(c.mask.height()) + "x" + std::to_string(c.mask.width()) +
                                        " but image " + rec.image_id + " is " + std::to_string(rec.height) +
                                        "x" + std::to_string(rec.width));
      }
      if (it == slots.end()) {
        // No remaining triplet uses this box (e.g. it was dropped by an
        // earlier pass); reported, not fatal, so reruns are idempotent.
        out.rejections.push_back({rec.image_id, c.box_id, ci, ingest_reason::kUnknownBox, 0.0});
        continue;
      }
      it->second.candidates.push_back(ci);
    }
    std::map<std::size_t, double> scores;
    for (auto& [box_id, slot] : slots) {
      double best = -1.0;
      for (std::size_t ci : slot.candidates) {
        const double s = box_mask_score(slot.box, candidates[ci].mask, options.mode);
        scores[ci] = s;
        if (s < options.filter_threshold) {
          out.rejections.push_back({rec.image_id, box_id, ci, ingest_reason::kBelowThreshold, s});
        } else if (s > best) {
          best = s;
          slot.winner = ci;
        }
      }
      for (std::size_t ci : slot.candidates) {
        if (scores[ci] >= options.filter_threshold && slot.winner != ci) {
          out.rejections.push_back({rec.image_id, box_id, ci, ingest_reason::kSuperseded, scores[ci]});
        }
      }
    }

    // Same-category deduplication in box-id order.
    std::map<int, std::vector<int>> by_category;
    for (const auto& [box_id, slot] : slots) {
      if (slot.winner) by_category[slot.category].push_back(box_id);
    }
    for (const auto& [cat, boxes] : by_category) {
      std::vector<int> kept;
      for (int b : boxes) {
        const RleMask& m = candidates[*slots[b].winner].mask;
        std::optional<int> suppressor;
        for (int k : kept) {
          if (mask_iou(m, candidates[*slots[k].winner].mask) > options.dedup_threshold) {
            suppressor = k;
            break;
          }
        }
        if (suppressor) {
          out.rejections.push_back({rec.image_id, b, *slots[b].winner, ingest_reason::kDuplicate,
                                    scores[*slots[b].winner]});
          slots[b].mask = candidates[*slots[*suppressor].winner].mask;
        } else {
          kept.push_back(b);
          slots[b].mask = m;
        }
      }
    }

    std::vector<GtTriplet> kept_triplets;
    for (std::size_t ti = 0; ti < rec.gt.size(); ++ti) {
      GtTriplet t = rec.gt[ti];
      bool complete = true;
      for (Entity* e : {&t.subject, t.object ? &*t.object : nullptr}) {
        if (!e) continue;
        if (e->box_id) {
          auto it = slots.find(*e->box_id);
          if (it != slots.end() && it->second.mask) e->mask = it->second.mask;
        }
        if (!e->mask) complete = false;
      }
      if (complete) {
        kept_triplets.push_back(std::move(t));
      } else {
        out.dropped.push_back({rec.image_id, ti, ingest_reason::kNoMask});
      }
    }
    rec.gt = std::move(kept_triplets);
  });

  IngestResult result;
  result.report.total_candidates = candidates.size();
  for (auto& o : outcomes) {
    result.report.rejections.insert(result.report.rejections.end(), o.rejections.begin(), o.rejections.end());
    result.report.dropped_triplets.insert(result.report.dropped_triplets.end(), o.dropped.begin(), o.dropped.end());
  }
  std::sort(result.report.rejections.begin(), result.report.rejections.end(), [](const auto& a, const auto& b) {
    return std::tie(a.image_id, a.box_id, a.candidate) < std::tie(b.image_id, b.box_id, b.candidate);
  });
  std::sort(result.report.dropped_triplets.begin(), result.report.dropped_triplets.end(),
            [](const auto& a, const auto& b) { return std::tie(a.image_id, a.triplet) < std::tie(b.image_id, b.triplet); });
  result.dataset = std::move(gt);
  return result;
}

}  // namespace vrs
