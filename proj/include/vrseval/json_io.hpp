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

// JSON encodings of the interchange records.
//
//   record  {"image_id": str, "size": [H, W], "gt": [gt...], "preds": [pred...]}
//   gt      {"sub": entity, "obj": entity | null, "pred": [predicate ids]}
//   entity  {"cat": id, "box": [x1, y1, x2, y2], "mask": rle, "box_id": n}
//   pred    {"sub": {"mask": rle, "box": [...], "scores": [...], "embed": [...]},
//            "obj": {...} | null, "pred_scores": [...], "pred_embed": [...]}
//   rle     {"size": [H, W], "counts": [...]}

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vrseval/catalog.hpp"
#include "vrseval/dataset.hpp"
#include "vrseval/error.hpp"
#include "vrseval/mask.hpp"

namespace vrs {

using Json = nlohmann::json;

namespace detail {

[[noreturn]] inline void schema_error(const std::string& msg) { fail(ErrorKind::kSchema, msg); }

inline const Json& require(const Json& obj, const char* key) {
  if (!obj.is_object()) schema_error(std::string("expected an object holding '") + key + "'");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(std::string("missing field '") + key + "'");
  return *it;
}

inline int as_int(const Json& v, const char* what) {
  if (!v.is_number_integer()) schema_error(std::string(what) + " must be an integer");
  return v.get<int>();
}

inline std::vector<double> as_doubles(const Json& v, const char* what) {
  if (!v.is_array()) schema_error(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) schema_error(std::string(what) + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline std::pair<int, int> as_size(const Json& v) {
  if (!v.is_array() || v.size() != 2) schema_error("size must be [height, width]");
  return {as_int(v[0], "height"), as_int(v[1], "width")};
}

}  // namespace detail

inline Json to_json(const RleMask& m) {
  Json counts = Json::array();
  for (auto c : m.counts()) counts.push_back(c);
  return Json{{"size", {m.height(), m.width()}}, {"counts", std::move(counts)}};
}

inline RleMask rle_from_json(const Json& j) {
  const auto [h, w] = detail::as_size(detail::require(j, "size"));
  const Json& counts = detail::require(j, "counts");
  if (counts.is_string()) detail::schema_error("compressed RLE strings are not supported");
  if (!counts.is_array()) detail::schema_error("counts must be an array");
  std::vector<RleMask::Count> runs;
  runs.reserve(counts.size());
  for (const auto& c : counts) {
    if (!c.is_number_integer() || c.get<long long>() < 0) {
      fail(ErrorKind::kCorruptMask, "run lengths must be nonnegative integers");
    }
    runs.push_back(c.get<RleMask::Count>());
  }
  return RleMask::from_counts(h, w, std::move(runs));
}

inline Json to_json(const BBox& b) { return Json::array({b.x1, b.y1, b.x2, b.y2}); }

inline BBox box_from_json(const Json& j) {
  const auto v = detail::as_doubles(j, "box");
  if (v.size() != 4) detail::schema_error("box must be [x1, y1, x2, y2]");
  BBox b{v[0], v[1], v[2], v[3]};
  if (!b.valid()) detail::schema_error("box violates x1 <= x2, y1 <= y2");
  return b;
}

inline Json to_json(const Entity& e) {
  Json j{{"cat", e.category}};
  if (e.box) j["box"] = to_json(*e.box);
  if (e.mask) j["mask"] = to_json(*e.mask);
  if (e.box_id) j["box_id"] = *e.box_id;
  return j;
}

inline Entity entity_from_json(const Json& j) {
  Entity e;
  e.category = detail::as_int(detail::require(j, "cat"), "cat");
  if (auto it = j.find("box"); it != j.end() && !it->is_null()) e.box = box_from_json(*it);
  if (auto it = j.find("mask"); it != j.end() && !it->is_null()) e.mask = rle_from_json(*it);
  if (auto it = j.find("box_id"); it != j.end() && !it->is_null()) e.box_id = detail::as_int(*it, "box_id");
  if (!e.box && !e.mask) detail::schema_error("entity needs a box or a mask");
  return e;
}

inline Json to_json(const GtTriplet& t) {
  Json j{{"sub", to_json(t.subject)}, {"pred", t.predicates}};
  j["obj"] = t.object ? to_json(*t.object) : Json(nullptr);
  return j;
}

inline GtTriplet gt_from_json(const Json& j) {
  GtTriplet t;
  t.subject = entity_from_json(detail::require(j, "sub"));
  if (auto it = j.find("obj"); it != j.end() && !it->is_null()) t.object = entity_from_json(*it);
  const Json& preds = detail::require(j, "pred");
  if (!preds.is_array()) detail::schema_error("pred must be an array of predicate ids");
  for (const auto& p : preds) t.predicates.push_back(detail::as_int(p, "predicate id"));
  std::sort(t.predicates.begin(), t.predicates.end());
  t.predicates.erase(std::unique(t.predicates.begin(), t.predicates.end()), t.predicates.end());
  return t;
}

inline Json to_json(const PredTriplet& p) {
  auto side = [](const std::optional<RleMask>& mask, const std::optional<BBox>& box,
                 const std::vector<double>& scores, const std::vector<double>& embed) {
    Json j = Json::object();
    if (mask) j["mask"] = to_json(*mask);
    if (box) j["box"] = to_json(*box);
    if (!scores.empty()) j["scores"] = scores;
    if (!embed.empty()) j["embed"] = embed;
    return j;
  };
  Json j{{"sub", side(p.subject_mask, p.subject_box, p.subject_scores, p.subject_embed)},
         {"obj", side(p.object_mask, p.object_box, p.object_scores, p.object_embed)},
         {"pred_scores", p.predicate_scores}};
  if (!p.predicate_embed.empty()) j["pred_embed"] = p.predicate_embed;
  return j;
}

inline PredTriplet pred_from_json(const Json& j) {
  PredTriplet p;
  auto side = [](const Json& s, std::optional<RleMask>& mask, std::optional<BBox>& box,
                 std::vector<double>& scores, std::vector<double>& embed) {
    if (s.is_null()) return;
    if (!s.is_object()) detail::schema_error("prediction side must be an object");
    if (auto it = s.find("mask"); it != s.end() && !it->is_null()) mask = rle_from_json(*it);
    if (auto it = s.find("box"); it != s.end() && !it->is_null()) box = box_from_json(*it);
    if (auto it = s.find("scores"); it != s.end()) scores = detail::as_doubles(*it, "scores");
    if (auto it = s.find("embed"); it != s.end()) embed = detail::as_doubles(*it, "embed");
  };
  side(detail::require(j, "sub"), p.subject_mask, p.subject_box, p.subject_scores, p.subject_embed);
  if (auto it = j.find("obj"); it != j.end()) {
    side(*it, p.object_mask, p.object_box, p.object_scores, p.object_embed);
  }
  p.predicate_scores = detail::as_doubles(detail::require(j, "pred_scores"), "pred_scores");
  if (auto it = j.find("pred_embed"); it != j.end()) {
    p.predicate_embed = detail::as_doubles(*it, "pred_embed");
  }
  return p;
}

inline std::string image_id_from_json(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  detail::schema_error("image_id must be a string or an integer");
}

inline Json to_json(const ImageRecord& rec) {
  Json gt = Json::array();
  for (const auto& t : rec.gt) gt.push_back(to_json(t));
  Json j{{"image_id", rec.image_id}, {"size", {rec.height, rec.width}}, {"gt", std::move(gt)}};
  if (!rec.preds.empty()) {
    Json preds = Json::array();
    for (const auto& p : rec.preds) preds.push_back(to_json(p));
    j["preds"] = std::move(preds);
  }
  return j;
}

inline ImageRecord record_from_json(const Json& j) {
  ImageRecord rec;
  rec.image_id = image_id_from_json(detail::require(j, "image_id"));
  std::tie(rec.height, rec.width) = detail::as_size(detail::require(j, "size"));
  if (auto it = j.find("gt"); it != j.end()) {
    if (!it->is_array()) detail::schema_error("gt must be an array");
    for (const auto& t : *it) rec.gt.push_back(gt_from_json(t));
  }
  if (auto it = j.find("preds"); it != j.end()) {
    if (!it->is_array()) detail::schema_error("preds must be an array");
    for (const auto& p : *it) rec.preds.push_back(pred_from_json(p));
  }
  return rec;
}

inline Json to_json(const CategoryCatalog& c) {
  Json rel = Json::array();
  for (const auto& r : c.relations) rel.push_back({r.object_id, r.predicate_id});
  Json j{{"kind", catalog_kind_name(c.kind)},
         {"objects", c.object_names},
         {"predicates", c.predicate_names},
         {"relations", std::move(rel)},
         {"subject_category", c.subject_category}};
  if (c.train_counts) j["train_counts"] = *c.train_counts;
  if (c.no_object_predicates) j["no_object_predicates"] = *c.no_object_predicates;
  if (!c.no_interaction_name.empty()) j["no_interaction"] = c.no_interaction_name;
  if (!c.zero_shot_objects.empty()) j["zero_shot_objects"] = c.zero_shot_objects;
  return j;
}

inline CategoryCatalog catalog_from_json(const Json& j) {
  CategoryCatalog c;
  try {
    c.kind = parse_catalog_kind(detail::require(j, "kind").get<std::string>());
    c.object_names = detail::require(j, "objects").get<std::vector<std::string>>();
    c.predicate_names = detail::require(j, "predicates").get<std::vector<std::string>>();
    if (auto it = j.find("relations"); it != j.end()) {
      for (const auto& r : *it) {
        if (!r.is_array() || r.size() != 2) detail::schema_error("relation must be [object, predicate]");
        c.relations.push_back({detail::as_int(r[0], "relation object"), detail::as_int(r[1], "relation predicate")});
      }
    }
    if (auto it = j.find("train_counts"); it != j.end()) {
      c.train_counts = it->get<std::vector<std::int64_t>>();
    }
    if (auto it = j.find("no_object_predicates"); it != j.end()) {
      c.no_object_predicates = it->get<std::vector<int>>();
    }
    if (auto it = j.find("subject_category"); it != j.end()) c.subject_category = it->get<int>();
    if (auto it = j.find("no_interaction"); it != j.end()) c.no_interaction_name = it->get<std::string>();
    if (auto it = j.find("zero_shot_objects"); it != j.end()) {
      c.zero_shot_objects = it->get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    detail::schema_error(std::string("catalog: ") + e.what());
  }
  c.validate();
  c.build_index();
  return c;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::kParse, where + ": " + e.what());
  }
}

/// Writes through a temporary sibling and renames it into place, so readers
/// never observe a partial file.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kIo, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) fail(ErrorKind::kIo, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) fail(ErrorKind::kIo, "cannot rename into '" + path + "': " + ec.message());
}

inline CategoryCatalog load_catalog(const std::string& path) {
  return catalog_from_json(parse_json_text(read_file(path), path));
}

}  // namespace vrs
