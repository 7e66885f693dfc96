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

// Adapters from the public annotation layouts into interchange records.
//
// HICO-DET / V-COCO (the widely used set-prediction layout): a JSON array of
//   {"file_name": str, "height": H, "width": W,
//    "annotations": [{"bbox": [x1, y1, x2, y2], "category_id": coco_id}],
//    "hoi_annotation": [{"subject_id": i, "object_id": j, "category_id": verb}]}
// where coco_id is the sparse 1..90 COCO id, verb is 1-based, and V-COCO uses
// object_id -1 for actions without an object.
//
// PSG: {"data": [{"file_name": str, "image_id": id, "height": H, "width": W,
//   "annotations": [{"bbox": [x1, y1, x2, y2], "category_id": c}],
//   "relations": [[subject_index, object_index, predicate]]}]}
// with 0-based category and predicate ids.
//
// Box annotation indices become Entity::box_id, which is the key used when
// attaching generated masks.

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "vrseval/dataset.hpp"
#include "vrseval/json_io.hpp"

namespace vrs {

enum class GtFormat { kInterchange, kHicoNative, kVcocoNative, kPsgNative };

inline GtFormat parse_gt_format(const std::string& name) {
  if (name == "jsonl" || name == "interchange") return GtFormat::kInterchange;
  if (name == "hico-native") return GtFormat::kHicoNative;
  if (name == "vcoco-native") return GtFormat::kVcocoNative;
  if (name == "psg-native") return GtFormat::kPsgNative;
  fail(ErrorKind::kInvalidArgument, "unknown annotation format '" + name + "'");
}

/// Sparse COCO category ids in the order of the 80-name vocabulary.
inline constexpr std::array<int, 80> kCocoCategoryIds = {
    1,  2,  3,  4,  5,  6,  7,  8,  9,  10, 11, 13, 14, 15, 16, 17, 18, 19, 20, 21,
    22, 23, 24, 25, 27, 28, 31, 32, 33, 34, 35, 36, 37, 38, 39, 40, 41, 42, 43, 44,
    46, 47, 48, 49, 50, 51, 52, 53, 54, 55, 56, 57, 58, 59, 60, 61, 62, 63, 64, 65,
    67, 70, 72, 73, 74, 75, 76, 77, 78, 79, 80, 81, 82, 84, 85, 86, 87, 88, 89, 90};

inline int coco_id_to_index(int coco_id) {
  for (std::size_t i = 0; i < kCocoCategoryIds.size(); ++i) {
    if (kCocoCategoryIds[i] == coco_id) return static_cast<int>(i);
  }
  fail(ErrorKind::kVocabulary, "unknown COCO category id " + std::to_string(coco_id));
}

namespace detail {

struct RawAnnotation {
  BBox box;
  int category;
};

/// Groups (subject, object, predicate) index triples into multi-label GT
/// triplets in order of first appearance. object index -1 means no object.
inline std::vector<GtTriplet> group_pairs(const std::vector<RawAnnotation>& boxes,
                                          const std::vector<std::array<int, 3>>& rels) {
  std::vector<GtTriplet> out;
  std::map<std::pair<int, int>, std::size_t> slot;
  auto entity = [&](int idx) {
    if (idx < 0 || idx >= static_cast<int>(boxes.size())) {
      schema_error("relation references annotation " + std::to_string(idx) + " of " +
                   std::to_string(boxes.size()));
    }
    Entity e;
    e.category = boxes[idx].category;
    e.box = boxes[idx].box;
    e.box_id = idx;
    return e;
  };
  for (const auto& [s, o, p] : rels) {
    auto [it, inserted] = slot.emplace(std::make_pair(s, o), out.size());
    if (inserted) {
      GtTriplet t;
      t.subject = entity(s);
      if (o >= 0) t.object = entity(o);
      out.push_back(std::move(t));
    }
    auto& preds = out[it->second].predicates;
    if (std::find(preds.begin(), preds.end(), p) == preds.end()) preds.push_back(p);
  }
  for (auto& t : out) std::sort(t.predicates.begin(), t.predicates.end());
  return out;
}

inline std::vector<RawAnnotation> read_annotations(const Json& rec, bool coco_ids) {
  std::vector<RawAnnotation> boxes;
  const Json& anns = require(rec, "annotations");
  if (!anns.is_array()) schema_error("annotations must be an array");
  for (const auto& a : anns) {
    RawAnnotation raw;
    raw.box = box_from_json(require(a, "bbox"));
    const int cat = as_int(require(a, "category_id"), "category_id");
    raw.category = coco_ids ? coco_id_to_index(cat) : cat;
    boxes.push_back(raw);
  }
  return boxes;
}

inline ImageRecord read_sized_record(const Json& rec) {
  ImageRecord out;
  if (auto it = rec.find("image_id"); it != rec.end()) {
    out.image_id = image_id_from_json(*it);
  } else if (auto it2 = rec.find("img_id"); it2 != rec.end()) {
    out.image_id = image_id_from_json(*it2);
  } else {
    out.image_id = require(rec, "file_name").get<std::string>();
  }
  out.height = as_int(require(rec, "height"), "height");
  out.width = as_int(require(rec, "width"), "width");
  return out;
}

}  // namespace detail

/// HICO-DET and V-COCO layout. Verb ids are 1-based into the catalog's
/// full predicate vocabulary.
inline std::vector<ImageRecord> adapt_hoi_native(const Json& root, const std::string& where) {
  if (!root.is_array()) fail(ErrorKind::kSchema, where + ": expected a JSON array of images");
  std::vector<ImageRecord> out;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const std::string locus = where + ": record " + std::to_string(i);
    try {
      const Json& rec = root[i];
      ImageRecord img = detail::read_sized_record(rec);
      const auto boxes = detail::read_annotations(rec, true);
      std::vector<std::array<int, 3>> rels;
      if (auto it = rec.find("hoi_annotation"); it != rec.end()) {
        for (const auto& h : *it) {
          const int s = detail::as_int(detail::require(h, "subject_id"), "subject_id");
          const int o = detail::as_int(detail::require(h, "object_id"), "object_id");
          const int v = detail::as_int(detail::require(h, "category_id"), "category_id");
          rels.push_back({s, o, v - 1});
        }
      }
      img.gt = detail::group_pairs(boxes, rels);
      out.push_back(std::move(img));
    } catch (const Error& e) {
      throw e.with_context(locus);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::kSchema, locus + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<ImageRecord> adapt_psg_native(const Json& root, const std::string& where) {
  const Json* data = &root;
  if (root.is_object()) data = &detail::require(root, "data");
  if (!data->is_array()) fail(ErrorKind::kSchema, where + ": expected a 'data' array");
  std::vector<ImageRecord> out;
  for (std::size_t i = 0; i < data->size(); ++i) {
    const std::string locus = where + ": record " + std::to_string(i);
    try {
      const Json& rec = (*data)[i];
      ImageRecord img = detail::read_sized_record(rec);
      const auto boxes = detail::read_annotations(rec, false);
      std::vector<std::array<int, 3>> rels;
      if (auto it = rec.find("relations"); it != rec.end()) {
        for (const auto& r : *it) {
          if (!r.is_array() || r.size() != 3) detail::schema_error("relation must be [s, o, p]");
          rels.push_back({detail::as_int(r[0], "s"), detail::as_int(r[1], "o"), detail::as_int(r[2], "p")});
        }
      }
      img.gt = detail::group_pairs(boxes, rels);
      out.push_back(std::move(img));
    } catch (const Error& e) {
      throw e.with_context(locus);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::kSchema, locus + ": " + e.what());
    }
  }
  return out;
}

}  // namespace vrs
