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
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vrseval/error.hpp"

namespace vrs {

enum class CatalogKind { kHico, kVcoco, kPsg, kVrd };

inline const char* catalog_kind_name(CatalogKind kind) {
  switch (kind) {
    case CatalogKind::kHico: return "hico";
    case CatalogKind::kVcoco: return "vcoco";
    case CatalogKind::kPsg: return "psg";
    case CatalogKind::kVrd: return "vrd";
  }
  return "hico";
}

inline CatalogKind parse_catalog_kind(const std::string& name) {
  if (name == "hico") return CatalogKind::kHico;
  if (name == "vcoco") return CatalogKind::kVcoco;
  if (name == "psg") return CatalogKind::kPsg;
  if (name == "vrd") return CatalogKind::kVrd;
  fail(ErrorKind::kInvalidArgument, "unknown catalog kind '" + name + "'");
}

/// A relation class: an (object category, predicate) pair. For HOI catalogs
/// the subject is implicitly the person category.
struct RelationClass {
  int object_id = 0;
  int predicate_id = 0;

  friend auto operator<=>(const RelationClass&, const RelationClass&) = default;
};

/// Object and predicate vocabularies plus the set of valid relation classes.
class CategoryCatalog {
 public:
  CatalogKind kind = CatalogKind::kHico;
  std::vector<std::string> object_names;
  std::vector<std::string> predicate_names;
  std::vector<RelationClass> relations;
  /// Training-instance count per relation class, parallel to `relations`.
  std::optional<std::vector<std::int64_t>> train_counts;
  /// Predicates that take no object (V-COCO body motions). Absent when the
  /// catalog does not describe them at all.
  std::optional<std::vector<int>> no_object_predicates;
  /// Category used as the implicit HOI subject.
  int subject_category = 0;
  /// Name of the HICO-DET no-interaction predicate, if the vocabulary has one.
  std::string no_interaction_name;
  /// Object names shipped for the unseen-object zero-shot split.
  std::vector<std::string> zero_shot_objects;

  int num_objects() const { return static_cast<int>(object_names.size()); }
  int num_predicates() const { return static_cast<int>(predicate_names.size()); }
  int num_relations() const { return static_cast<int>(relations.size()); }

  bool valid_object(int id) const { return id >= 0 && id < num_objects(); }
  bool valid_predicate(int id) const { return id >= 0 && id < num_predicates(); }

  std::optional<int> object_index(const std::string& name) const {
    return find_name(object_names, name);
  }
  std::optional<int> predicate_index(const std::string& name) const {
    return find_name(predicate_names, name);
  }

  /// Index of (object, predicate) in `relations`, or nullopt.
  /// Uses the index built by build_index() when it is current, otherwise
  /// scans; never mutates, so concurrent readers are safe.
  std::optional<int> relation_index(int object_id, int predicate_id) const {
    const RelationClass key{object_id, predicate_id};
    if (relation_lookup_.size() == relations.size()) {
      auto it = relation_lookup_.find(key);
      if (it == relation_lookup_.end()) return std::nullopt;
      return it->second;
    }
    for (std::size_t i = 0; i < relations.size(); ++i) {
      if (relations[i] == key) return static_cast<int>(i);
    }
    return std::nullopt;
  }

  void build_index() {
    relation_lookup_.clear();
    for (std::size_t i = 0; i < relations.size(); ++i) {
      relation_lookup_.emplace(relations[i], static_cast<int>(i));
    }
  }

  bool is_no_object_predicate(int id) const {
    if (!no_object_predicates) return false;
    return std::find(no_object_predicates->begin(), no_object_predicates->end(), id) !=
           no_object_predicates->end();
  }

  /// Throws a vocabulary error on duplicate names or dangling ids.
  void validate() const {
    check_unique(object_names, "object");
    check_unique(predicate_names, "predicate");
    std::set<RelationClass> seen;
    for (std::size_t i = 0; i < relations.size(); ++i) {
      const auto& r = relations[i];
      if (!valid_object(r.object_id) || !valid_predicate(r.predicate_id)) {
        fail(ErrorKind::kVocabulary, "relation " + std::to_string(i) + " references an unknown category");
      }
      if (!seen.insert(r).second) {
        fail(ErrorKind::kVocabulary, "relation " + std::to_string(i) + " is listed twice");
      }
    }
    if (train_counts) {
      if (train_counts->size() != relations.size()) {
        fail(ErrorKind::kVocabulary, "train_counts has " + std::to_string(train_counts->size()) +
                                         " entries for " + std::to_string(relations.size()) +
                                         " relations");
      }
      for (auto c : *train_counts) {
        if (c < 0) fail(ErrorKind::kVocabulary, "negative training count");
      }
    }
    if (no_object_predicates) {
      for (int p : *no_object_predicates) {
        if (!valid_predicate(p)) fail(ErrorKind::kVocabulary, "no-object predicate id out of range");
      }
    }
    if (num_objects() > 0 && !valid_object(subject_category)) {
      fail(ErrorKind::kVocabulary, "subject category out of range");
    }
  }

  /// Removes one predicate from the vocabulary, dropping the relation
  /// classes that use it. Returns the old-to-new predicate id map (-1 for
  /// the removed predicate).
  std::vector<int> remove_predicate(int predicate_id) {
    std::vector<int> remap(predicate_names.size());
    int next = 0;
    for (int p = 0; p < num_predicates(); ++p) remap[p] = (p == predicate_id) ? -1 : next++;
    std::vector<RelationClass> kept;
    std::vector<std::int64_t> kept_counts;
    for (std::size_t i = 0; i < relations.size(); ++i) {
      if (relations[i].predicate_id == predicate_id) continue;
      kept.push_back({relations[i].object_id, remap[relations[i].predicate_id]});
      if (train_counts) kept_counts.push_back((*train_counts)[i]);
    }
    relations = std::move(kept);
    if (train_counts) train_counts = std::move(kept_counts);
    if (no_object_predicates) {
      std::vector<int> ids;
      for (int p : *no_object_predicates) {
        if (remap[p] >= 0) ids.push_back(remap[p]);
      }
      no_object_predicates = std::move(ids);
    }
    predicate_names.erase(predicate_names.begin() + predicate_id);
    build_index();
    return remap;
  }

 private:
  static std::optional<int> find_name(const std::vector<std::string>& names, const std::string& name) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return static_cast<int>(i);
    }
    return std::nullopt;
  }

  static void check_unique(const std::vector<std::string>& names, const char* what) {
    std::set<std::string> seen;
    for (const auto& n : names) {
      if (!seen.insert(n).second) {
        fail(ErrorKind::kVocabulary, std::string("duplicate ") + what + " name '" + n + "'");
      }
    }
  }

  std::map<RelationClass, int> relation_lookup_;
};

/// Rare/non-rare partition of relation class ids.
struct RarePartition {
  std::vector<int> rare;
  std::vector<int> non_rare;
};

/// Relations with fewer than `threshold` training instances are rare.
inline RarePartition rare_partition(const CategoryCatalog& catalog, std::int64_t threshold = 10) {
  if (!catalog.train_counts) {
    fail(ErrorKind::kConstraint, "rare partition needs per-relation training counts");
  }
  RarePartition out;
  for (int r = 0; r < catalog.num_relations(); ++r) {
    ((*catalog.train_counts)[r] < threshold ? out.rare : out.non_rare).push_back(r);
  }
  return out;
}

}  // namespace vrs
