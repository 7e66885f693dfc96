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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vrseval/cli.hpp"

namespace {

void add_common(CLI::App* cmd, vrs::RunConfig& cfg) {
  cmd->add_option("--catalog", cfg.catalog_path, "Category catalog JSON")->required();
  cmd->add_option("--threads", cfg.threads, "Worker threads (0: VRSEVAL_THREADS or all cores)");
  cmd->add_option("--out", cfg.out_path, "Output file (written atomically); stdout when omitted");
}

void add_gt(CLI::App* cmd, vrs::RunConfig& cfg) {
  cmd->add_option("--gt", cfg.gt_path, "Ground-truth file")->required();
  cmd->add_option("--gt-format", cfg.gt_format, "jsonl, hico-native, vcoco-native or psg-native");
  cmd->add_flag("--keep-no-interaction", cfg.keep_no_interaction, "Keep the no-interaction predicate");
}

void add_eval_inputs(CLI::App* cmd, vrs::RunConfig& cfg) {
  add_common(cmd, cfg);
  add_gt(cmd, cfg);
  cmd->add_option("--preds", cfg.preds_path, "Predictions JSONL")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visual relationship segmentation evaluation toolkit"};
  app.set_version_flag("--version", std::string(VRSEVAL_VERSION));
  app.require_subcommand(1);
  vrs::RunConfig cfg;

  auto* convert = app.add_subcommand("convert", "Attach candidate masks to ground-truth boxes");
  add_common(convert, cfg);
  add_gt(convert, cfg);
  convert->add_option("--candidates", cfg.candidates_path, "Candidate masks JSONL");
  convert->add_option("--report", cfg.report_path, "Rejection report JSON file");
  convert->add_option("--filter-thresh", cfg.filter_thresh, "Minimum box/mask IoU to keep a candidate");
  convert->add_option("--dedup-thresh", cfg.dedup_thresh, "Mask IoU above which duplicates are merged");
  convert->add_option("--filter-mode", cfg.filter_mode, "box (box vs mask box) or region (box region vs mask)");

  auto* eval = app.add_subcommand("eval", "Evaluate predictions");
  add_eval_inputs(eval, cfg);
  eval->add_option("--preset", cfg.preset, "hico, vcoco, psg or vrd");
  eval->add_option("--iou-thresh", cfg.iou_thresh, "IoU threshold for a true positive");
  eval->add_option("--loc", cfg.loc, "Localization: box or mask");
  eval->add_option("--topk", cfg.topk, "Triplets kept per image");
  eval->add_option("--ks", cfg.ks, "Recall K values")->delimiter(',');
  eval->add_option("--scenario", cfg.scenario, "Role AP scenario: S1 or S2");
  eval->add_option("--split", cfg.split_path, "Zero-shot split JSON for Unseen/Seen/Full means");
  eval->add_option("--fair", cfg.fair, "Prediction transform: none, mask-to-box or box-fill");
  eval->add_option("--summary", cfg.summary_path, "Write the summary table to this file");

  auto* splits = app.add_subcommand("make-splits", "Build a zero-shot split");
  add_common(splits, cfg);
  splits->add_option("--kind", cfg.split_kind, "rf-uc, nf-uc, uo or uv")->required();
  splits->add_option("--n", cfg.n, "Number of unseen relations, objects or verbs");
  splits->add_option("--seed", cfg.seed, "Seed for random selection");
  splits->add_option("--names", cfg.names, "Comma-separated names, or 'catalog' for the shipped object list");
  splits->add_option("--train-gt", cfg.train_gt_path, "Training ground truth to recount relations from");
  splits->add_option("--gt-format", cfg.gt_format, "Format of --train-gt");
  splits->add_flag("--keep-no-interaction", cfg.keep_no_interaction, "Keep the no-interaction predicate");

  auto* prompt = app.add_subcommand("eval-prompt", "Promptable selection and sIoU");
  add_eval_inputs(prompt, cfg);
  prompt->add_option("--prompts", cfg.prompts_path, "Prompt file")->required();
  prompt->add_option("--k", cfg.k, "Triplets ranked before slot filtering");
  prompt->add_flag("--baseline", cfg.baseline, "Rank by standard confidence instead of similarity");
  prompt->add_flag("--cosine", cfg.cosine, "Cosine instead of dot-product similarity");
  prompt->add_option("--loc", cfg.loc, "Localization: box or mask");

  auto* match = app.add_subcommand("match-debug", "Dump matching costs and assignments");
  add_eval_inputs(match, cfg);
  match->add_option("--weights", cfg.weights, "Weight preset name");
  match->add_option("--weights-file", cfg.weights_path, "JSON file with additional presets");
  match->add_flag("--full-ce", cfg.full_ce, "Cross-entropy classification cost");
  match->add_option("--image", cfg.image_id, "Only this image");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return vrs::kExitInput;
  }
  for (auto* sub : {convert, eval, splits, prompt, match}) {
    if (sub->parsed()) cfg.command = sub->get_name();
  }
  return vrs::run_command(cfg);
}
