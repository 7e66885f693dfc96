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

// Structured prompts: <s>subject</s><p>predicate</p><o>object</o>, any
// non-empty subset of the tags in any order. Predictions are ranked by the
// similarity between a prompt feature and their composed class embeddings,
// then filtered by the slots whose category is known.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrseval/catalog.hpp"
#include "vrseval/dataset.hpp"
#include "vrseval/error.hpp"
#include "vrseval/json_io.hpp"
#include "vrseval/losses.hpp"

namespace vrs {

enum class Slot { kSubject, kPredicate, kObject };

inline char slot_tag(Slot s) {
  switch (s) {
    case Slot::kSubject: return 's';
    case Slot::kPredicate: return 'p';
    case Slot::kObject: return 'o';
  }
  return '?';
}

inline const char* slot_name(Slot s) {
  switch (s) {
    case Slot::kSubject: return "subject";
    case Slot::kPredicate: return "predicate";
    case Slot::kObject: return "object";
  }
  return "?";
}

struct SlotValue {
  std::string text;
  /// Category id when the text names a catalog category; free-form otherwise.
  std::optional<int> id;

  friend bool operator==(const SlotValue&, const SlotValue&) = default;
};

struct PromptQuery {
  std::optional<SlotValue> subject;
  std::optional<SlotValue> predicate;
  std::optional<SlotValue> object;
  /// Slots in the order they appeared in the text.
  std::vector<Slot> order;
  std::string raw;

  const std::optional<SlotValue>& slot(Slot s) const {
    return s == Slot::kSubject ? subject : (s == Slot::kPredicate ? predicate : object);
  }
  std::optional<SlotValue>& slot(Slot s) {
    return s == Slot::kSubject ? subject : (s == Slot::kPredicate ? predicate : object);
  }
  bool has(Slot s) const { return slot(s).has_value(); }
};

namespace detail {

[[noreturn]] inline void prompt_error(std::size_t pos, const std::string& msg) {
  fail(ErrorKind::kParse, "prompt position " + std::to_string(pos) + ": " + msg);
}

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::optional<Slot> slot_of_tag(char c) {
  if (c == 's') return Slot::kSubject;
  if (c == 'p') return Slot::kPredicate;
  if (c == 'o') return Slot::kObject;
  return std::nullopt;
}

}  // namespace detail

/// Parses the tagged grammar. Slot texts are kept verbatim (trimmed); ids
/// are filled in by resolve_prompt.
inline PromptQuery parse_prompt(const std::string& text) {
  PromptQuery q;
  q.raw = text;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto skip_ws = [&] {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  if (i == n) detail::prompt_error(0, "empty prompt");
  while (i < n) {
    const std::size_t open = i;
    if (text[i] != '<') detail::prompt_error(i, "expected '<'");
    if (i + 2 >= n || text[i + 2] != '>') detail::prompt_error(i, "malformed opening tag");
    auto slot = detail::slot_of_tag(text[i + 1]);
    if (!slot) detail::prompt_error(i + 1, std::string("unknown tag '") + text[i + 1] + "'");
    if (q.has(*slot)) detail::prompt_error(open, std::string("repeated <") + slot_tag(*slot) + "> tag");
    i += 3;
    const std::string close = std::string("</") + slot_tag(*slot) + ">";
    const std::size_t end = text.find(close, i);
    if (end == std::string::npos) detail::prompt_error(open, "missing " + close);
    const std::string body = text.substr(i, end - i);
    if (auto lt = body.find_first_of("<>"); lt != std::string::npos) {
      detail::prompt_error(i + lt, "tag characters inside a slot");
    }
    std::string value = detail::trim(body);
    if (value.empty()) detail::prompt_error(i, std::string("empty <") + slot_tag(*slot) + "> slot");
    q.slot(*slot) = SlotValue{std::move(value), std::nullopt};
    q.order.push_back(*slot);
    i = end + close.size();
    skip_ws();
  }
  return q;
}

/// Re-renders the grammar in the original slot order.
inline std::string render_prompt(const PromptQuery& q) {
  std::string out;
  for (Slot s : q.order) {
    const char t = slot_tag(s);
    out += std::string("<") + t + ">" + q.slot(s)->text + "</" + t + ">";
  }
  return out;
}

/// Resolves slot texts against the catalog; unknown names stay free-form.
inline PromptQuery resolve_prompt(PromptQuery q, const CategoryCatalog& catalog) {
  if (q.subject) q.subject->id = catalog.object_index(q.subject->text);
  if (q.object) q.object->id = catalog.object_index(q.object->text);
  if (q.predicate) q.predicate->id = catalog.predicate_index(q.predicate->text);
  return q;
}

struct PromptFeature {
  std::vector<double> vector;
  /// Slots the feature encodes.
  std::vector<Slot> slots;

  void validate() const {
    if (vector.empty()) fail(ErrorKind::kInvalidArgument, "prompt feature is empty");
    for (double v : vector) {
      if (!std::isfinite(v)) fail(ErrorKind::kInvalidArgument, "prompt feature has a non-finite entry");
    }
  }
};

/// Sum of the class embeddings of exactly the slots filled in `query`.
inline std::vector<double> compose_triplet_embedding(const PredTriplet& pred, const PromptQuery& query) {
  std::vector<double> out;
  for (Slot s : {Slot::kSubject, Slot::kPredicate, Slot::kObject}) {
    if (!query.has(s)) continue;
    const auto& e = s == Slot::kSubject ? pred.subject_embed
                                        : (s == Slot::kPredicate ? pred.predicate_embed : pred.object_embed);
    if (e.empty()) fail(ErrorKind::kConstraint, std::string("prediction lacks a ") + slot_name(s) + " embedding");
    if (out.empty()) {
      out = e;
    } else {
      if (e.size() != out.size()) fail(ErrorKind::kDimension, "embedding dimensions differ");
      for (std::size_t i = 0; i < e.size(); ++i) out[i] += e[i];
    }
  }
  if (out.empty()) fail(ErrorKind::kInvalidArgument, "prompt has no filled slot");
  return out;
}

struct SimilarityOptions {
  bool cosine = false;
};

inline double similarity(std::span<const double> a, std::span<const double> b, const SimilarityOptions& options = {}) {
  const double d = dot(a, b);
  if (!options.cosine) return d;
  const double na = std::sqrt(dot(a, a)), nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return d / (na * nb);
}

namespace detail {

inline std::vector<std::size_t> top_indices(const std::vector<double>& key, int k) {
  if (k <= 0) fail(ErrorKind::kInvalidArgument, "k must be positive, got " + std::to_string(k));
  std::vector<std::size_t> idx(key.size());
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t keep = std::min(idx.size(), static_cast<std::size_t>(k));
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                    [&](std::size_t a, std::size_t b) { return key[a] != key[b] ? key[a] > key[b] : a < b; });
  idx.resize(keep);
  return idx;
}

inline int argmax_or(const std::vector<double>& v, int fallback) {
  if (v.empty()) return fallback;
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace detail

/// Indices of the k predictions most similar to the prompt, descending,
/// ties by index.
inline std::vector<std::size_t> rank_by_similarity(std::span<const PredTriplet> preds, const PromptFeature& prompt,
                                                   const PromptQuery& query, int k = 10,
                                                   const SimilarityOptions& options = {}) {
  if (k <= 0) fail(ErrorKind::kInvalidArgument, "k must be positive, got " + std::to_string(k));
  prompt.validate();
  std::vector<double> sim(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto e = compose_triplet_embedding(preds[i], query);
    if (e.size() != prompt.vector.size()) {
      fail(ErrorKind::kDimension, "prediction " + std::to_string(i) + " embedding has dimension " +
                                      std::to_string(e.size()) + ", prompt has " +
                                      std::to_string(prompt.vector.size()));
    }
    sim[i] = similarity(e, prompt.vector, options);
  }
  return detail::top_indices(sim, k);
}

/// Whether the argmax categories agree with every slot of known id. A
/// prediction without a subject head agrees with any subject slot.
inline bool agrees_with_slots(const PredTriplet& pred, const PromptQuery& query) {
  if (query.subject && query.subject->id) {
    const int s = detail::argmax_or(pred.subject_scores, -1);
    if (s >= 0 && s != *query.subject->id) return false;
  }
  if (query.object && query.object->id && detail::argmax_or(pred.object_scores, -1) != *query.object->id) {
    return false;
  }
  if (query.predicate && query.predicate->id &&
      detail::argmax_or(pred.predicate_scores, -1) != *query.predicate->id) {
    return false;
  }
  return true;
}

/// Keeps the ranked indices whose predictions agree with the known slots,
/// preserving rank order. Free-form slots never filter.
inline std::vector<std::size_t> filter_topk_by_slots(std::span<const PredTriplet> preds,
                                                     const std::vector<std::size_t>& ranked, const PromptQuery& query) {
  std::vector<std::size_t> out;
  for (std::size_t i : ranked) {
    if (i >= preds.size()) fail(ErrorKind::kInvalidArgument, "ranked index out of range");
    if (agrees_with_slots(preds[i], query)) out.push_back(i);
  }
  return out;
}

/// Standard confidence: product of the argmax probabilities of the heads
/// (an omitted subject head contributes 1).
inline double standard_confidence(const PredTriplet& pred) {
  double c = 1.0;
  for (const auto* v : {&pred.subject_scores, &pred.object_scores, &pred.predicate_scores}) {
    if (!v->empty()) c *= *std::max_element(v->begin(), v->end());
  }
  return c;
}

/// Ranks by standard confidence, keeps the top k, then filters by slots.
inline std::vector<std::size_t> postprocess_baseline(std::span<const PredTriplet> preds, const PromptQuery& query,
                                                     int k = 10) {
  std::vector<double> conf(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) conf[i] = standard_confidence(preds[i]);
  return filter_topk_by_slots(preds, detail::top_indices(conf, k), query);
}

/// Retrieval path: similarity ranking followed by slot filtering.
inline std::vector<std::size_t> retrieve(std::span<const PredTriplet> preds, const PromptFeature& prompt,
                                         const PromptQuery& query, int k = 10, const SimilarityOptions& options = {}) {
  return filter_topk_by_slots(preds, rank_by_similarity(preds, prompt, query, k, options), query);
}

/// One line of a prompt file: `image_id<TAB>prompt[<TAB>[embedding...]]`.
struct PromptRecord {
  std::string image_id;
  PromptQuery query;
  std::optional<PromptFeature> feature;
};

inline PromptRecord parse_prompt_line(const std::string& line) {
  PromptRecord rec;
  const std::size_t t1 = line.find('\t');
  if (t1 == std::string::npos) fail(ErrorKind::kParse, "expected image_id<TAB>prompt");
  rec.image_id = line.substr(0, t1);
  if (rec.image_id.empty()) fail(ErrorKind::kParse, "empty image_id");
  const std::size_t t2 = line.find('\t', t1 + 1);
  rec.query = parse_prompt(line.substr(t1 + 1, t2 == std::string::npos ? std::string::npos : t2 - t1 - 1));
  if (t2 != std::string::npos) {
    const Json j = parse_json_text(line.substr(t2 + 1), "prompt embedding");
    PromptFeature f;
    f.vector = detail::as_doubles(j, "prompt embedding");
    f.slots = rec.query.order;
    f.validate();
    rec.feature = std::move(f);
  }
  return rec;
}

inline std::vector<PromptRecord> load_prompts(const std::string& path, const CategoryCatalog& catalog) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "'");
  std::vector<PromptRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    try {
      PromptRecord rec = parse_prompt_line(line);
      rec.query = resolve_prompt(std::move(rec.query), catalog);
      out.push_back(std::move(rec));
    } catch (const Error& e) {
      throw e.with_context(path + ":" + std::to_string(lineno));
    }
  }
  return out;
}

/// Whether a ground-truth triplet matches the known slots of a query.
inline bool gt_matches_query(const GtTriplet& t, const PromptQuery& q) {
  if (q.subject && q.subject->id && t.subject.category != *q.subject->id) return false;
  if (q.object && q.object->id && (!t.object || t.object->category != *q.object->id)) return false;
  if (q.predicate && q.predicate->id &&
      !std::binary_search(t.predicates.begin(), t.predicates.end(), *q.predicate->id)) {
    return false;
  }
  return true;
}

}  // namespace vrs
