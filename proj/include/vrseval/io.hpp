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

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "vrseval/adapters.hpp"
#include "vrseval/dataset.hpp"
#include "vrseval/json_io.hpp"

namespace vrs {

struct GtLoadOptions {
  GtFormat format = GtFormat::kInterchange;
  /// Removes the catalog's no-interaction predicate (and its relations).
  bool drop_no_interaction = true;
  /// Recompute per-relation training counts from this file.
  bool training_split = false;
};

namespace detail {

/// Calls fn(json, line_number) for every non-blank line of a JSON-lines file.
template <typename Fn>
void for_each_jsonl(const std::string& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::kParse, where + ": " + e.what());
    }
    try {
      fn(j, where);
    } catch (const Error& e) {
      throw e.with_context(where);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::kSchema, where + ": " + e.what());
    }
  }
}

inline void remap_predicates(ImageRecord& rec, const std::vector<int>& remap) {
  std::vector<GtTriplet> kept;
  for (auto& t : rec.gt) {
    std::vector<int> ids;
    for (int p : t.predicates) {
      if (p >= 0 && p < static_cast<int>(remap.size()) && remap[p] >= 0) ids.push_back(remap[p]);
    }
    if (ids.empty()) continue;
    t.predicates = std::move(ids);
    kept.push_back(std::move(t));
  }
  rec.gt = std::move(kept);
}

}  // namespace detail

/// Loads ground truth and normalizes it against `catalog`. Every record is
/// validated; corrupt records are rejected, never repaired.
inline Dataset load_gt(const std::string& path, const CategoryCatalog& catalog,
                       const GtLoadOptions& options = {}) {
  Dataset ds;
  ds.catalog = catalog;
  ds.catalog.build_index();
  std::vector<std::string> loci;
  if (options.format == GtFormat::kInterchange) {
    detail::for_each_jsonl(path, [&](const Json& j, const std::string& where) {
      ImageRecord rec = record_from_json(j);
      validate_record(rec, ds.catalog);
      ds.images.push_back(std::move(rec));
      loci.push_back(where);
    });
  } else {
    const Json root = parse_json_text(read_file(path), path);
    ds.images = options.format == GtFormat::kPsgNative ? adapt_psg_native(root, path)
                                                       : adapt_hoi_native(root, path);
    for (std::size_t i = 0; i < ds.images.size(); ++i) {
      const std::string where = path + ": record " + std::to_string(i);
      try {
        validate_record(ds.images[i], ds.catalog);
      } catch (const Error& e) {
        throw e.with_context(where);
      }
      loci.push_back(where);
    }
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < ds.images.size(); ++i) {
    if (!ids.insert(ds.images[i].image_id).second) {
      fail(ErrorKind::kSchema, loci[i] + ": duplicate image_id '" + ds.images[i].image_id + "'");
    }
  }
  if (options.drop_no_interaction && !ds.catalog.no_interaction_name.empty()) {
    if (auto p = ds.catalog.predicate_index(ds.catalog.no_interaction_name)) {
      const auto remap = ds.catalog.remove_predicate(*p);
      for (auto& rec : ds.images) detail::remap_predicates(rec, remap);
    }
  }
  if (options.training_split) ds.catalog.train_counts = count_relations(ds);
  return ds;
}

struct ImagePredictions {
  std::string image_id;
  std::vector<PredTriplet> preds;
};

/// Reads {"image_id", "preds"} lines. Score lengths and embedding dimensions
/// are checked against the catalog; mask extents are checked on attach.
inline std::vector<ImagePredictions> load_preds(const std::string& path, const CategoryCatalog& catalog) {
  std::vector<ImagePredictions> out;
  std::size_t embed_dim = 0;
  detail::for_each_jsonl(path, [&](const Json& j, const std::string&) {
    ImagePredictions ip;
    ip.image_id = image_id_from_json(detail::require(j, "image_id"));
    const Json& preds = detail::require(j, "preds");
    if (!preds.is_array()) detail::schema_error("preds must be an array");
    ImageRecord probe;
    probe.image_id = ip.image_id;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      PredTriplet p = pred_from_json(preds[i]);
      const std::string where = "preds[" + std::to_string(i) + "]";
      // Extent checks need the image size; use the mask's own size here.
      const RleMask* any_mask = p.subject_mask ? &*p.subject_mask : (p.object_mask ? &*p.object_mask : nullptr);
      probe.height = any_mask ? any_mask->height() : 1;
      probe.width = any_mask ? any_mask->width() : 1;
      validate_pred(p, probe, catalog, where);
      for (const auto* e : {&p.subject_embed, &p.object_embed, &p.predicate_embed}) {
        if (e->empty()) continue;
        if (embed_dim == 0) embed_dim = e->size();
        if (e->size() != embed_dim) {
          detail::schema_error(where + ": embedding dimension " + std::to_string(e->size()) +
                               " differs from the file's " + std::to_string(embed_dim));
        }
      }
      ip.preds.push_back(std::move(p));
    }
    out.push_back(std::move(ip));
  });
  return out;
}

/// Removes the score column of a predicate dropped from the vocabulary
/// after the predictions were read.
inline void drop_predicate_column(std::vector<ImagePredictions>& preds, int predicate_id) {
  for (auto& ip : preds) {
    for (auto& p : ip.preds) {
      if (predicate_id >= 0 && static_cast<std::size_t>(predicate_id) < p.predicate_scores.size()) {
        p.predicate_scores.erase(p.predicate_scores.begin() + predicate_id);
      }
    }
  }
}

/// Appends predictions to their records, preserving file order.
inline void attach_preds(Dataset& ds, std::vector<ImagePredictions> preds) {
  const auto index = ds.index();
  for (auto& ip : preds) {
    auto it = index.find(ip.image_id);
    if (it == index.end()) {
      fail(ErrorKind::kReference, "predictions reference unknown image_id '" + ip.image_id + "'");
    }
    ImageRecord& rec = ds.images[it->second];
    for (std::size_t i = 0; i < ip.preds.size(); ++i) {
      validate_pred(ip.preds[i], rec, ds.catalog,
                    "image " + rec.image_id + " preds[" + std::to_string(rec.preds.size()) + "]");
      rec.preds.push_back(std::move(ip.preds[i]));
    }
  }
}

inline std::string dataset_to_jsonl(const Dataset& ds) {
  std::string out;
  for (const auto& rec : ds.images) {
    out += to_json(rec).dump();
    out += '\n';
  }
  return out;
}

inline void save_dataset(const Dataset& ds, const std::string& path) {
  write_file_atomic(path, dataset_to_jsonl(ds));
}

}  // namespace vrs
