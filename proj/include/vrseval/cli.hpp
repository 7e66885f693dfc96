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

// Command implementations behind the vrseval binary. Results go to the
// output stream (or --out files, written atomically); diagnostics go to
// the error stream.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vrseval/catalog.hpp"
#include "vrseval/error.hpp"
#include "vrseval/ingest.hpp"
#include "vrseval/io.hpp"
#include "vrseval/json_io.hpp"
#include "vrseval/matching.hpp"
#include "vrseval/metrics.hpp"
#include "vrseval/retrieval.hpp"
#include "vrseval/splits.hpp"

namespace vrs {

enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitConstraint = 2, kExitInternal = 3 };

struct RunConfig {
  std::string command;
  // Inputs.
  std::string catalog_path;
  std::string gt_path;
  std::string gt_format = "jsonl";
  std::string preds_path;
  std::string candidates_path;
  std::string prompts_path;
  std::string split_path;
  std::string weights_path;
  std::string train_gt_path;
  // Outputs.
  std::string out_path;
  std::string report_path;
  std::string summary_path;
  // Task preset: hico, vcoco, psg or vrd.
  std::string preset = "hico";
  bool keep_no_interaction = false;
  // Thresholds.
  double filter_thresh = 0.2;
  double dedup_thresh = 0.1;
  double iou_thresh = 0.5;
  std::string filter_mode = "box";
  std::string loc = "mask";
  std::string fair = "none";
  // Evaluation.
  std::optional<std::size_t> topk;
  std::vector<int> ks{20, 50, 100};
  std::string scenario = "S1";
  // Matching.
  std::string weights = "default";
  bool full_ce = false;
  std::string image_id;
  // Splits.
  std::string split_kind;
  std::optional<std::size_t> n;
  std::uint64_t seed = 0;
  std::string names;
  // Prompts.
  int k = 10;
  bool baseline = false;
  bool cosine = false;
  unsigned threads = 0;
};

namespace detail {

inline void require_path(const std::string& path, const char* flag) {
  if (path.empty()) fail(ErrorKind::kInvalidArgument, std::string(flag) + " is required");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) fail(ErrorKind::kIo, std::string(flag) + ": no such file '" + path + "'");
}

inline void optional_path(const std::string& path, const char* flag) {
  if (!path.empty()) require_path(path, flag);
}

inline void check_unit(double v, const char* flag, bool allow_zero = false) {
  if (!((allow_zero ? v >= 0.0 : v > 0.0) && v <= 1.0)) {
    fail(ErrorKind::kInvalidArgument, std::string(flag) + " must lie in " + (allow_zero ? "[0, 1]" : "(0, 1]"));
  }
}

inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

inline std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

inline unsigned thread_count(const RunConfig& cfg) { return cfg.threads == 0 ? default_thread_count() : cfg.threads; }

/// Loads ground truth and (optionally) predictions. Prediction scores cover
/// the full catalog vocabulary; a predicate removed at load is removed from
/// the scores too.
inline Dataset load_eval_dataset(const RunConfig& cfg, bool with_preds) {
  const CategoryCatalog catalog = load_catalog(cfg.catalog_path);
  GtLoadOptions options;
  options.format = parse_gt_format(cfg.gt_format);
  options.drop_no_interaction = !cfg.keep_no_interaction;
  Dataset ds = load_gt(cfg.gt_path, catalog, options);
  if (with_preds) {
    auto preds = load_preds(cfg.preds_path, catalog);
    if (ds.catalog.num_predicates() != catalog.num_predicates()) {
      if (auto p = catalog.predicate_index(catalog.no_interaction_name)) drop_predicate_column(preds, *p);
    }
    attach_preds(ds, std::move(preds));
  }
  return ds;
}

}  // namespace detail

/// Checks thresholds and input paths before any work starts.
inline void validate_config(const RunConfig& cfg) {
  detail::check_unit(cfg.filter_thresh, "--filter-thresh", true);
  detail::check_unit(cfg.dedup_thresh, "--dedup-thresh");
  detail::check_unit(cfg.iou_thresh, "--iou-thresh");
  parse_localization(cfg.loc);
  if (cfg.preset != "hico" && cfg.preset != "vcoco" && cfg.preset != "psg" && cfg.preset != "vrd") {
    fail(ErrorKind::kInvalidArgument, "unknown preset '" + cfg.preset + "'");
  }
  detail::require_path(cfg.catalog_path, "--catalog");
  const std::string& c = cfg.command;
  if (c == "convert") {
    detail::require_path(cfg.gt_path, "--gt");
    detail::optional_path(cfg.candidates_path, "--candidates");
    if (cfg.out_path.empty()) fail(ErrorKind::kInvalidArgument, "--out is required");
    if (cfg.filter_mode != "box" && cfg.filter_mode != "region") {
      fail(ErrorKind::kInvalidArgument, "--filter-mode must be box or region");
    }
  } else if (c == "eval" || c == "eval-prompt" || c == "match-debug") {
    detail::require_path(cfg.gt_path, "--gt");
    detail::require_path(cfg.preds_path, "--preds");
    if (c == "eval") {
      detail::optional_path(cfg.split_path, "--split");
      for (int k : cfg.ks) {
        if (k <= 0) fail(ErrorKind::kInvalidArgument, "--ks values must be positive");
      }
      parse_vcoco_scenario(cfg.scenario);
      if (cfg.fair != "none" && cfg.fair != "mask-to-box" && cfg.fair != "box-fill") {
        fail(ErrorKind::kInvalidArgument, "--fair must be none, mask-to-box or box-fill");
      }
    }
    if (c == "eval-prompt") {
      detail::require_path(cfg.prompts_path, "--prompts");
      if (cfg.k <= 0) fail(ErrorKind::kInvalidArgument, "--k must be positive");
    }
    if (c == "match-debug") detail::optional_path(cfg.weights_path, "--weights-file");
  } else if (c == "make-splits") {
    parse_split_kind(cfg.split_kind);
    detail::optional_path(cfg.train_gt_path, "--train-gt");
  } else {
    fail(ErrorKind::kInvalidArgument, "unknown command '" + c + "'");
  }
}

/// convert: attach candidate masks to ground-truth boxes.
inline void cmd_convert(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const CategoryCatalog catalog = load_catalog(cfg.catalog_path);
  GtLoadOptions load;
  load.format = parse_gt_format(cfg.gt_format);
  load.drop_no_interaction = false;
  Dataset ds = load_gt(cfg.gt_path, catalog, load);
  std::vector<CandidateRecord> candidates;
  if (!cfg.candidates_path.empty()) candidates = load_candidates(cfg.candidates_path);
  IngestOptions options;
  options.filter_threshold = cfg.filter_thresh;
  options.dedup_threshold = cfg.dedup_thresh;
  options.mode = cfg.filter_mode == "region" ? FilterIouMode::kBoxRegionVsMask : FilterIouMode::kBoxVsMaskBox;
  options.threads = detail::thread_count(cfg);
  IngestResult result = attach_masks(std::move(ds), candidates, options);
  save_dataset(result.dataset, cfg.out_path);
  const std::string report = to_json(result.report).dump(2) + "\n";
  if (!cfg.report_path.empty()) write_file_atomic(cfg.report_path, report);
  out << report;
  err << "convert: " << result.report.retained() << "/" << result.report.total_candidates
      << " candidates retained, " << result.report.dropped_triplets.size() << " triplets dropped\n";
}

/// eval: run the preset's protocol.
inline void cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Dataset ds = detail::load_eval_dataset(cfg, true);
  Json fairness = Json::array();
  if (cfg.fair != "none") {
    auto t = transform_for_fairness(ds, cfg.fair == "mask-to-box" ? FairnessDirection::kMaskToBox
                                                                  : FairnessDirection::kBoxToMask,
                                    box_fill_masks());
    for (const auto& e : t.errors) {
      err << "eval: image " << e.image_id << " prediction " << e.pred_index << ": " << e.message << "\n";
      fairness.push_back({{"image_id", e.image_id}, {"pred_index", e.pred_index}, {"message", e.message}});
    }
    ds = std::move(t.dataset);
  }
  const TpRule rule{parse_localization(cfg.loc), cfg.iou_thresh};
  const unsigned threads = detail::thread_count(cfg);
  EvalReport report;
  if (cfg.preset == "hico") {
    HoiMapOptions o;
    o.top_k = cfg.topk.value_or(100);
    o.threads = threads;
    report = eval_hoi_map(ds, rule, o);
  } else if (cfg.preset == "vcoco") {
    VcocoOptions o;
    o.scenario = parse_vcoco_scenario(cfg.scenario);
    o.top_k = cfg.topk.value_or(0);
    o.threads = threads;
    report = eval_vcoco_role_ap(ds, rule, o);
  } else {
    PsgRecallOptions o;
    o.ks = cfg.ks;
    o.threads = threads;
    report = eval_psg_recall(ds, rule, o);
  }
  Json j = to_json(report);
  if (cfg.fair != "none") j["fairness_errors"] = std::move(fairness);
  if (!cfg.split_path.empty()) {
    const ZeroShotSplit split = split_from_json(parse_json_text(read_file(cfg.split_path), cfg.split_path));
    j["split"] = to_json(eval_split_report(report, split));
    j["split"]["kind"] = split_kind_name(split.kind);
  }
  detail::emit(cfg.out_path, j.dump(2) + "\n", out);
  const std::string table = summary_table(report);
  err << table;
  if (!cfg.summary_path.empty()) write_file_atomic(cfg.summary_path, table);
}

/// make-splits: zero-shot split over the catalog's relation classes.
inline void cmd_make_splits(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  CategoryCatalog catalog = load_catalog(cfg.catalog_path);
  if (!cfg.train_gt_path.empty()) {
    GtLoadOptions load;
    load.format = parse_gt_format(cfg.gt_format);
    load.drop_no_interaction = !cfg.keep_no_interaction;
    load.training_split = true;
    catalog = load_gt(cfg.train_gt_path, catalog, load).catalog;
  } else if (!cfg.keep_no_interaction && !catalog.no_interaction_name.empty()) {
    if (auto p = catalog.predicate_index(catalog.no_interaction_name)) catalog.remove_predicate(*p);
  }
  const SplitKind kind = parse_split_kind(cfg.split_kind);
  ZeroShotSplit split;
  switch (kind) {
    case SplitKind::kRareFirst:
    case SplitKind::kNonRareFirst:
      split = make_uc_split(catalog, kind, cfg.n.value_or(115));
      break;
    case SplitKind::kUnseenObject:
      if (cfg.names == "catalog") {
        split = make_uo_split_from_names(catalog, catalog.zero_shot_objects);
      } else if (!cfg.names.empty()) {
        split = make_uo_split_from_names(catalog, detail::split_names(cfg.names));
      } else {
        split = make_uo_split(catalog, cfg.n.value_or(12), cfg.seed);
      }
      break;
    case SplitKind::kUnseenVerb:
      if (!cfg.names.empty()) {
        std::vector<int> ids;
        for (const auto& name : detail::split_names(cfg.names)) {
          auto id = catalog.predicate_index(name);
          if (!id) fail(ErrorKind::kVocabulary, "unknown predicate '" + name + "'");
          ids.push_back(*id);
        }
        split = make_uv_split_from_ids(catalog, std::move(ids));
      } else {
        if (!cfg.n) fail(ErrorKind::kInvalidArgument, "uv splits need --n or --names");
        split = make_uv_split(catalog, *cfg.n, cfg.seed);
      }
      break;
  }
  detail::emit(cfg.out_path, to_json(split).dump(2) + "\n", out);
  err << "make-splits: " << split_kind_name(kind) << " " << split.unseen_relations.size() << "/"
      << split.seen_relations.size() << "/" << split.full_size() << " unseen/seen/full\n";
}

/// eval-prompt: select triplets per prompt and score their localization.
inline void cmd_eval_prompt(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Dataset ds = detail::load_eval_dataset(cfg, true);
  const auto prompts = load_prompts(cfg.prompts_path, ds.catalog);
  const SimilarityOptions sim{cfg.cosine};
  Dataset prompted;
  prompted.catalog = ds.catalog;
  Json rows = Json::array();
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const PromptRecord& pr = prompts[i];
    auto idx = ds.find(pr.image_id);
    if (!idx) fail(ErrorKind::kReference, cfg.prompts_path + ": prompt " + std::to_string(i) +
                                              " references unknown image_id '" + pr.image_id + "'");
    const ImageRecord& rec = ds.images[*idx];
    std::vector<std::size_t> selected;
    if (cfg.baseline) {
      selected = postprocess_baseline(rec.preds, pr.query, cfg.k);
    } else {
      if (!pr.feature) {
        fail(ErrorKind::kSchema, cfg.prompts_path + ": prompt " + std::to_string(i) +
                                     " has no embedding; use --baseline or supply one");
      }
      selected = retrieve(rec.preds, *pr.feature, pr.query, cfg.k, sim);
    }
    ImageRecord one;
    one.image_id = rec.image_id;
    one.height = rec.height;
    one.width = rec.width;
    for (const auto& t : rec.gt) {
      if (gt_matches_query(t, pr.query)) {
        one.gt.push_back(t);
        break;
      }
    }
    if (one.gt.empty() && !rec.gt.empty()) one.gt.push_back(rec.gt.front());
    if (!selected.empty()) one.preds.push_back(rec.preds[selected.front()]);
    prompted.images.push_back(std::move(one));
    rows.push_back({{"image_id", rec.image_id}, {"prompt", render_prompt(pr.query)}, {"selected", selected}});
  }
  if (prompted.images.empty()) fail(ErrorKind::kConstraint, "prompt file holds no prompts");
  const EvalReport report = eval_siou(prompted, parse_localization(cfg.loc));
  std::size_t r = 0;
  for (std::size_t i = 0; i < prompted.images.size(); ++i) {
    if (prompted.images[i].gt.empty()) {
      rows[i]["s_iou"] = nullptr;
      rows[i]["o_iou"] = nullptr;
      continue;
    }
    rows[i]["s_iou"] = report.rows[r].values.at("S-IoU");
    rows[i]["o_iou"] = report.rows[r].values.at("O-IoU");
    ++r;
  }
  Json j{{"mode", cfg.baseline ? "baseline" : "retrieval"},
         {"k", cfg.k},
         {"prompts", std::move(rows)},
         {"report", to_json(report)}};
  detail::emit(cfg.out_path, j.dump(2) + "\n", out);
  err << summary_table(report);
}

/// match-debug: cost matrices and optimal assignments per image.
inline void cmd_match_debug(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const Dataset ds = detail::load_eval_dataset(cfg, true);
  const auto presets = cfg.weights_path.empty() ? builtin_weight_presets() : load_weight_presets(cfg.weights_path);
  const LossWeights w = weight_preset(cfg.weights, presets);
  CostOptions options;
  options.full_ce = cfg.full_ce;
  Json images = Json::array();
  bool found = cfg.image_id.empty();
  for (const auto& rec : ds.images) {
    if (!cfg.image_id.empty() && rec.image_id != cfg.image_id) continue;
    found = true;
    images.push_back(to_json(match_image(rec, w, options, detail::thread_count(cfg))));
  }
  if (!found) fail(ErrorKind::kReference, "unknown image_id '" + cfg.image_id + "'");
  Json j{{"preset", cfg.weights}, {"weights", to_json(w)}, {"full_ce", cfg.full_ce}, {"images", std::move(images)}};
  detail::emit(cfg.out_path, j.dump(2) + "\n", out);
}

inline int exit_code_for(const Error& e) {
  if (e.kind() == ErrorKind::kConstraint || e.kind() == ErrorKind::kEmptyMask) return kExitConstraint;
  return kExitInput;
}

/// Validates and runs one command, mapping failures to exit codes.
inline int run_command(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    validate_config(cfg);
    if (cfg.command == "convert") {
      cmd_convert(cfg, out, err);
    } else if (cfg.command == "eval") {
      cmd_eval(cfg, out, err);
    } else if (cfg.command == "make-splits") {
      cmd_make_splits(cfg, out, err);
    } else if (cfg.command == "eval-prompt") {
      cmd_eval_prompt(cfg, out, err);
    } else {
      cmd_match_debug(cfg, out, err);
    }
    out.flush();
    return kExitOk;
  } catch (const Error& e) {
    err << "vrseval " << cfg.command << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const nlohmann::json::exception& e) {
    err << "vrseval " << cfg.command << ": schema error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "vrseval " << cfg.command << ": internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace vrs
