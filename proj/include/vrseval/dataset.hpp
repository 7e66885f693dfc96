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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vrseval/catalog.hpp"
#include "vrseval/error.hpp"
#include "vrseval/mask.hpp"

namespace vrs {

/// One grounded object. At least one of box/mask is present.
struct Entity {
  int category = 0;
  std::optional<BBox> box;
  std::optional<RleMask> mask;
  /// Stable key used to attach externally generated masks.
  std::optional<int> box_id;

  friend bool operator==(const Entity&, const Entity&) = default;
};

/// Ground-truth relationship. `object` is absent only for predicates that
/// take no object (V-COCO body motions).
struct GtTriplet {
  Entity subject;
  std::optional<Entity> object;
  std::vector<int> predicates;  // sorted, unique, nonempty

  friend bool operator==(const GtTriplet&, const GtTriplet&) = default;
};

/// Model output for one query. Score vectors are already-normalized
/// probabilities; an empty subject score vector means the subject head was
/// omitted (HOI). Embeddings are empty when not supplied. An object with
/// neither mask nor box declares "no object".
struct PredTriplet {
  std::optional<RleMask> subject_mask;
  std::optional<RleMask> object_mask;
  std::optional<BBox> subject_box;
  std::optional<BBox> object_box;
  std::vector<double> subject_scores;
  std::vector<double> object_scores;
  std::vector<double> predicate_scores;
  std::vector<double> subject_embed;
  std::vector<double> object_embed;
  std::vector<double> predicate_embed;

  bool declares_object() const {
    if (object_mask) return !object_mask->empty();
    return object_box.has_value();
  }

  friend bool operator==(const PredTriplet&, const PredTriplet&) = default;
};

struct ImageRecord {
  std::string image_id;
  int height = 0;
  int width = 0;
  std::vector<GtTriplet> gt;
  std::vector<PredTriplet> preds;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct Dataset {
  CategoryCatalog catalog;
  std::vector<ImageRecord> images;

  std::optional<std::size_t> find(const std::string& image_id) const {
    for (std::size_t i = 0; i < images.size(); ++i) {
      if (images[i].image_id == image_id) return i;
    }
    return std::nullopt;
  }

  std::map<std::string, std::size_t> index() const {
    std::map<std::string, std::size_t> out;
    for (std::size_t i = 0; i < images.size(); ++i) out.emplace(images[i].image_id, i);
    return out;
  }
};

namespace detail {

inline void check_mask_extent(const RleMask& m, const ImageRecord& rec, const std::string& where) {
  if (m.height() != rec.height || m.width() != rec.width) {
    fail(ErrorKind::kDimension, where + ": mask is " + std::to_string(m.height()) + "x" +
                                    std::to_string(m.width()) + " but image is " +
                                    std::to_string(rec.height) + "x" + std::to_string(rec.width));
  }
}

inline void check_entity(const Entity& e, const ImageRecord& rec, const CategoryCatalog& catalog,
                         const std::string& where) {
  if (!catalog.valid_object(e.category)) {
    fail(ErrorKind::kVocabulary, where + ": unknown object category " + std::to_string(e.category));
  }
  if (!e.box && !e.mask) fail(ErrorKind::kSchema, where + ": entity has neither box nor mask");
  if (e.box && !e.box->valid()) fail(ErrorKind::kSchema, where + ": invalid box");
  if (e.mask) check_mask_extent(*e.mask, rec, where);
}

inline void check_scores(const std::vector<double>& scores, std::size_t expected, bool optional,
                         const std::string& where) {
  if (optional && scores.empty()) return;
  if (scores.size() != expected) {
    fail(ErrorKind::kSchema, where + ": expected " + std::to_string(expected) + " scores, got " +
                                 std::to_string(scores.size()));
  }
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) fail(ErrorKind::kSchema, where + ": score outside [0, 1]");
  }
}

}  // namespace detail

/// Enforces every record-level invariant; `where` prefixes error messages.
inline void validate_gt(const GtTriplet& t, const ImageRecord& rec, const CategoryCatalog& catalog,
                        const std::string& where) {
  detail::check_entity(t.subject, rec, catalog, where + " subject");
  if (t.predicates.empty()) fail(ErrorKind::kSchema, where + ": empty predicate set");
  for (std::size_t i = 0; i < t.predicates.size(); ++i) {
    if (!catalog.valid_predicate(t.predicates[i])) {
      fail(ErrorKind::kVocabulary, where + ": unknown predicate " + std::to_string(t.predicates[i]));
    }
    if (i > 0 && t.predicates[i] <= t.predicates[i - 1]) {
      fail(ErrorKind::kSchema, where + ": predicate set must be sorted and unique");
    }
  }
  if (t.object) {
    detail::check_entity(*t.object, rec, catalog, where + " object");
  } else {
    for (int p : t.predicates) {
      if (!catalog.is_no_object_predicate(p)) {
        fail(ErrorKind::kSchema, where + ": object missing for predicate " + std::to_string(p));
      }
    }
  }
}

inline void validate_pred(const PredTriplet& p, const ImageRecord& rec, const CategoryCatalog& catalog,
                          const std::string& where) {
  if (!p.subject_mask && !p.subject_box) fail(ErrorKind::kSchema, where + ": subject has no localization");
  if (p.subject_mask) detail::check_mask_extent(*p.subject_mask, rec, where + " subject");
  if (p.object_mask) detail::check_mask_extent(*p.object_mask, rec, where + " object");
  if (p.subject_box && !p.subject_box->valid()) fail(ErrorKind::kSchema, where + ": invalid subject box");
  if (p.object_box && !p.object_box->valid()) fail(ErrorKind::kSchema, where + ": invalid object box");
  const auto n_obj = static_cast<std::size_t>(catalog.num_objects());
  detail::check_scores(p.subject_scores, n_obj, true, where + " subject");
  detail::check_scores(p.object_scores, n_obj, false, where + " object");
  detail::check_scores(p.predicate_scores, static_cast<std::size_t>(catalog.num_predicates()), false,
                       where + " predicate");
  std::size_t dim = 0;
  for (const auto* e : {&p.subject_embed, &p.object_embed, &p.predicate_embed}) {
    if (e->empty()) continue;
    for (double v : *e) {
      if (!std::isfinite(v)) fail(ErrorKind::kSchema, where + ": non-finite embedding entry");
    }
    if (dim == 0) {
      dim = e->size();
    } else if (e->size() != dim) {
      fail(ErrorKind::kSchema, where + ": embedding dimensions differ (" + std::to_string(dim) +
                                   " vs " + std::to_string(e->size()) + ")");
    }
  }
}

inline void validate_record(const ImageRecord& rec, const CategoryCatalog& catalog) {
  const std::string base = "image " + rec.image_id;
  if (rec.height <= 0 || rec.width <= 0) fail(ErrorKind::kSchema, base + ": size must be positive");
  for (std::size_t i = 0; i < rec.gt.size(); ++i) {
    validate_gt(rec.gt[i], rec, catalog, base + " gt[" + std::to_string(i) + "]");
  }
  for (std::size_t i = 0; i < rec.preds.size(); ++i) {
    validate_pred(rec.preds[i], rec, catalog, base + " preds[" + std::to_string(i) + "]");
  }
}

/// Number of (triplet, predicate) instances per relation class.
inline std::vector<std::int64_t> count_relations(const Dataset& dataset) {
  std::vector<std::int64_t> counts(dataset.catalog.relations.size(), 0);
  for (const auto& rec : dataset.images) {
    for (const auto& t : rec.gt) {
      if (!t.object) continue;
      for (int p : t.predicates) {
        if (auto r = dataset.catalog.relation_index(t.object->category, p)) ++counts[*r];
      }
    }
  }
  return counts;
}

}  // namespace vrs
