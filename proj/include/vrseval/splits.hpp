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
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vrseval/catalog.hpp"
#include "vrseval/dataset.hpp"
#include "vrseval/error.hpp"
#include "vrseval/json_io.hpp"
#include "vrseval/metrics.hpp"

namespace vrs {

enum class SplitKind { kRareFirst, kNonRareFirst, kUnseenObject, kUnseenVerb };

inline const char* split_kind_name(SplitKind k) {
  switch (k) {
    case SplitKind::kRareFirst: return "rf-uc";
    case SplitKind::kNonRareFirst: return "nf-uc";
    case SplitKind::kUnseenObject: return "uo";
    case SplitKind::kUnseenVerb: return "uv";
  }
  return "?";
}

inline SplitKind parse_split_kind(const std::string& s) {
  if (s == "rf-uc") return SplitKind::kRareFirst;
  if (s == "nf-uc") return SplitKind::kNonRareFirst;
  if (s == "uo") return SplitKind::kUnseenObject;
  if (s == "uv") return SplitKind::kUnseenVerb;
  fail(ErrorKind::kInvalidArgument, "unknown split kind '" + s + "' (expected rf-uc, nf-uc, uo or uv)");
}

struct ZeroShotSplit {
  SplitKind kind = SplitKind::kRareFirst;
  std::vector<int> unseen_relations;  // sorted
  std::vector<int> seen_relations;    // sorted
  std::vector<int> unseen_objects;    // UO only
  std::vector<int> unseen_predicates; // UV only
  std::optional<std::uint64_t> seed;

  std::size_t full_size() const { return unseen_relations.size() + seen_relations.size(); }

  friend bool operator==(const ZeroShotSplit&, const ZeroShotSplit&) = default;
};

namespace detail {

inline ZeroShotSplit partition_relations(SplitKind kind, const CategoryCatalog& catalog,
                                         const std::vector<char>& unseen) {
  ZeroShotSplit s;
  s.kind = kind;
  for (int r = 0; r < catalog.num_relations(); ++r) (unseen[r] ? s.unseen_relations : s.seen_relations).push_back(r);
  return s;
}

/// Fisher-Yates driven directly by mt19937 output so the selection is the
/// same across standard libraries.
inline std::vector<int> seeded_sample(std::vector<int> pool, std::size_t n, std::uint64_t seed) {
  std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
  for (std::size_t i = pool.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng()) % i;
    std::swap(pool[i - 1], pool[j]);
  }
  pool.resize(n);
  std::sort(pool.begin(), pool.end());
  return pool;
}

inline void require_nonempty_seen(const ZeroShotSplit& s) {
  if (s.seen_relations.empty()) fail(ErrorKind::kConstraint, "split leaves no seen relation");
}

}  // namespace detail

/// Unseen-composition split: the n relations with the smallest (rare first)
/// or largest (non-rare first) training counts, ties by index ascending.
/// Every object and predicate must remain in some seen relation.
inline ZeroShotSplit make_uc_split(const CategoryCatalog& catalog, SplitKind kind, std::size_t n_unseen = 115) {
  if (kind != SplitKind::kRareFirst && kind != SplitKind::kNonRareFirst) {
    fail(ErrorKind::kInvalidArgument, "make_uc_split needs rf-uc or nf-uc");
  }
  if (!catalog.train_counts) fail(ErrorKind::kConstraint, "composition split needs training counts");
  const auto& counts = *catalog.train_counts;
  if (n_unseen >= catalog.relations.size()) {
    fail(ErrorKind::kInvalidArgument, "n_unseen must be below the relation count " +
                                          std::to_string(catalog.relations.size()));
  }
  std::vector<int> order(catalog.relations.size());
  std::iota(order.begin(), order.end(), 0);
  const bool rare_first = kind == SplitKind::kRareFirst;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return rare_first ? counts[a] < counts[b] : counts[a] > counts[b];
  });
  std::vector<char> unseen(catalog.relations.size(), 0);
  for (std::size_t i = 0; i < n_unseen; ++i) unseen[order[i]] = 1;

  std::set<int> objects, predicates, seen_objects, seen_predicates;
  for (int r = 0; r < catalog.num_relations(); ++r) {
    const auto& rc = catalog.relations[r];
    objects.insert(rc.object_id);
    predicates.insert(rc.predicate_id);
    if (!unseen[r]) {
      seen_objects.insert(rc.object_id);
      seen_predicates.insert(rc.predicate_id);
    }
  }
  for (int o : objects) {
    if (!seen_objects.count(o)) {
      fail(ErrorKind::kConstraint, "split removes object '" + catalog.object_names[o] + "' from every seen relation");
    }
  }
  for (int p : predicates) {
    if (!seen_predicates.count(p)) {
      fail(ErrorKind::kConstraint,
           "split removes predicate '" + catalog.predicate_names[p] + "' from every seen relation");
    }
  }
  return detail::partition_relations(kind, catalog, unseen);
}

/// Unseen-object split from an explicit object id list.
inline ZeroShotSplit make_uo_split_from_ids(const CategoryCatalog& catalog, std::vector<int> objects) {
  std::sort(objects.begin(), objects.end());
  objects.erase(std::unique(objects.begin(), objects.end()), objects.end());
  std::vector<char> is_unseen(static_cast<std::size_t>(catalog.num_objects()), 0);
  for (int o : objects) {
    if (!catalog.valid_object(o)) fail(ErrorKind::kVocabulary, "unknown object id " + std::to_string(o));
    is_unseen[o] = 1;
  }
  std::vector<char> unseen(catalog.relations.size(), 0);
  for (int r = 0; r < catalog.num_relations(); ++r) unseen[r] = is_unseen[catalog.relations[r].object_id];
  ZeroShotSplit s = detail::partition_relations(SplitKind::kUnseenObject, catalog, unseen);
  s.unseen_objects = std::move(objects);
  detail::require_nonempty_seen(s);
  return s;
}

/// Unseen-object split from object names (e.g. the catalog's shipped list).
inline ZeroShotSplit make_uo_split_from_names(const CategoryCatalog& catalog, const std::vector<std::string>& names) {
  std::vector<int> ids;
  for (const auto& n : names) {
    auto id = catalog.object_index(n);
    if (!id) fail(ErrorKind::kVocabulary, "unknown object '" + n + "'");
    ids.push_back(*id);
  }
  return make_uo_split_from_ids(catalog, std::move(ids));
}

/// Seeded random unseen-object split.
inline ZeroShotSplit make_uo_split(const CategoryCatalog& catalog, std::size_t n_unseen_objects = 12,
                                   std::uint64_t seed = 0) {
  if (n_unseen_objects >= static_cast<std::size_t>(catalog.num_objects())) {
    fail(ErrorKind::kInvalidArgument, "n_unseen_objects must be below the object count");
  }
  std::vector<int> pool(static_cast<std::size_t>(catalog.num_objects()));
  std::iota(pool.begin(), pool.end(), 0);
  ZeroShotSplit s = make_uo_split_from_ids(catalog, detail::seeded_sample(std::move(pool), n_unseen_objects, seed));
  s.seed = seed;
  return s;
}

inline ZeroShotSplit make_uv_split_from_ids(const CategoryCatalog& catalog, std::vector<int> predicates) {
  std::sort(predicates.begin(), predicates.end());
  predicates.erase(std::unique(predicates.begin(), predicates.end()), predicates.end());
  std::vector<char> is_unseen(static_cast<std::size_t>(catalog.num_predicates()), 0);
  for (int p : predicates) {
    if (!catalog.valid_predicate(p)) fail(ErrorKind::kVocabulary, "unknown predicate id " + std::to_string(p));
    is_unseen[p] = 1;
  }
  std::vector<char> unseen(catalog.relations.size(), 0);
  for (int r = 0; r < catalog.num_relations(); ++r) unseen[r] = is_unseen[catalog.relations[r].predicate_id];
  ZeroShotSplit s = detail::partition_relations(SplitKind::kUnseenVerb, catalog, unseen);
  s.unseen_predicates = std::move(predicates);
  detail::require_nonempty_seen(s);
  return s;
}

/// Seeded random unseen-verb split.
inline ZeroShotSplit make_uv_split(const CategoryCatalog& catalog, std::size_t n_unseen_verbs, std::uint64_t seed = 0) {
  if (n_unseen_verbs >= static_cast<std::size_t>(catalog.num_predicates())) {
    fail(ErrorKind::kInvalidArgument, "n_unseen_verbs must be below the predicate count");
  }
  std::vector<int> pool(static_cast<std::size_t>(catalog.num_predicates()));
  std::iota(pool.begin(), pool.end(), 0);
  ZeroShotSplit s = make_uv_split_from_ids(catalog, detail::seeded_sample(std::move(pool), n_unseen_verbs, seed));
  s.seed = seed;
  return s;
}

/// Drops from every ground-truth triplet the predicates whose relation is
/// unseen (and, for UO/UV, those touching an unseen object or predicate);
/// triplets left without predicates are removed.
inline Dataset filter_train(const Dataset& ds, const ZeroShotSplit& split) {
  const CategoryCatalog& cat = ds.catalog;
  std::vector<char> rel_unseen(cat.relations.size(), 0);
  for (int r : split.unseen_relations) {
    if (r < 0 || r >= cat.num_relations()) fail(ErrorKind::kReference, "split relation id out of range");
    rel_unseen[r] = 1;
  }
  std::vector<char> obj_unseen(static_cast<std::size_t>(cat.num_objects()), 0);
  for (int o : split.unseen_objects) {
    if (cat.valid_object(o)) obj_unseen[o] = 1;
  }
  std::vector<char> pred_unseen(static_cast<std::size_t>(cat.num_predicates()), 0);
  for (int p : split.unseen_predicates) {
    if (cat.valid_predicate(p)) pred_unseen[p] = 1;
  }
  Dataset out;
  out.catalog = cat;
  out.images.reserve(ds.images.size());
  for (const ImageRecord& rec : ds.images) {
    ImageRecord nr;
    nr.image_id = rec.image_id;
    nr.height = rec.height;
    nr.width = rec.width;
    nr.preds = rec.preds;
    for (const GtTriplet& t : rec.gt) {
      if (t.object && obj_unseen[t.object->category]) continue;
      GtTriplet kept = t;
      kept.predicates.clear();
      for (int p : t.predicates) {
        if (pred_unseen[p]) continue;
        if (t.object) {
          if (auto r = cat.relation_index(t.object->category, p); r && rel_unseen[*r]) continue;
        }
        kept.predicates.push_back(p);
      }
      if (!kept.predicates.empty()) nr.gt.push_back(std::move(kept));
    }
    out.images.push_back(std::move(nr));
  }
  return out;
}

struct SplitReport {
  std::optional<double> unseen;
  std::optional<double> seen;
  std::optional<double> full;
  std::vector<std::string> flags;
};

/// Unseen/Seen/Full means of the per-relation AP values of a report.
inline SplitReport eval_split_report(const EvalReport& report, const ZeroShotSplit& split) {
  SplitReport out;
  std::vector<int> full = split.unseen_relations;
  full.insert(full.end(), split.seen_relations.begin(), split.seen_relations.end());
  out.unseen = mean_of_rows(report.rows, "AP", &split.unseen_relations);
  out.seen = mean_of_rows(report.rows, "AP", &split.seen_relations);
  out.full = mean_of_rows(report.rows, "AP", &full);
  if (!out.unseen) out.flags.push_back("no unseen relation with ground truth");
  if (!out.seen) out.flags.push_back("no seen relation with ground truth");
  if (!out.full) out.flags.push_back("no relation with ground truth");
  return out;
}

inline Json to_json(const SplitReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"unseen", opt(r.unseen)}, {"seen", opt(r.seen)}, {"full", opt(r.full)}, {"flags", r.flags}};
}

inline Json to_json(const ZeroShotSplit& s) {
  return Json{{"kind", split_kind_name(s.kind)},
              {"seed", s.seed ? Json(*s.seed) : Json(nullptr)},
              {"num_unseen", s.unseen_relations.size()},
              {"num_seen", s.seen_relations.size()},
              {"num_full", s.full_size()},
              {"unseen_relations", s.unseen_relations},
              {"seen_relations", s.seen_relations},
              {"unseen_objects", s.unseen_objects},
              {"unseen_predicates", s.unseen_predicates}};
}

inline ZeroShotSplit split_from_json(const Json& j) {
  ZeroShotSplit s;
  if (!j.is_object()) detail::schema_error("split must be an object");
  s.kind = parse_split_kind(detail::require(j, "kind").get<std::string>());
  if (auto it = j.find("seed"); it != j.end() && !it->is_null()) s.seed = it->get<std::uint64_t>();
  auto ids = [&](const char* key, std::vector<int>& out) {
    if (auto it = j.find(key); it != j.end()) out = it->get<std::vector<int>>();
  };
  ids("unseen_relations", s.unseen_relations);
  ids("seen_relations", s.seen_relations);
  ids("unseen_objects", s.unseen_objects);
  ids("unseen_predicates", s.unseen_predicates);
  return s;
}

}  // namespace vrs
