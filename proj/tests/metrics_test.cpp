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

#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "test_util.hpp"
#include "vrseval/io.hpp"
#include "vrseval/metrics.hpp"

namespace {

using testutil::MicroKind;
using vrs::Localization;
using vrs::TpRule;

constexpr double kTol = 1e-9;

vrs::ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const vrs::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return vrs::ErrorKind::kInvalidArgument;
}

/// Replaces every image's predictions with exact copies of its ground truth.
vrs::Dataset perfect(vrs::Dataset ds) {
  const auto& cat = ds.catalog;
  for (auto& rec : ds.images) {
    rec.preds.clear();
    for (const auto& g : rec.gt) {
      vrs::PredTriplet p;
      p.subject_mask = g.subject.mask;
      if (g.object) p.object_mask = g.object->mask;
      p.subject_scores.assign(cat.num_objects(), 0.0);
      p.subject_scores[g.subject.category] = 1.0;
      p.object_scores.assign(cat.num_objects(), 0.0);
      p.object_scores[g.object ? g.object->category : 0] = 1.0;
      p.predicate_scores.assign(cat.num_predicates(), 0.0);
      for (int q : g.predicates) p.predicate_scores[q] = 1.0;
      rec.preds.push_back(std::move(p));
    }
  }
  return ds;
}

vrs::CategoryCatalog hoi_catalog() {
  vrs::CategoryCatalog c;
  c.object_names = {"person", "cup"};
  c.predicate_names = {"hold"};
  c.relations = {{1, 0}};
  c.build_index();
  return c;
}

vrs::ImageRecord image(const std::string& id, const vrs::RleMask& s, const vrs::RleMask& o) {
  vrs::ImageRecord rec;
  rec.image_id = id;
  rec.height = s.height();
  rec.width = s.width();
  vrs::GtTriplet g;
  g.subject = vrs::Entity{0, std::nullopt, s, std::nullopt};
  g.object = vrs::Entity{1, std::nullopt, o, std::nullopt};
  g.predicates = {0};
  rec.gt.push_back(std::move(g));
  return rec;
}

vrs::PredTriplet scored(const vrs::RleMask& s, const vrs::RleMask& o, double conf) {
  vrs::PredTriplet p;
  p.subject_mask = s;
  p.object_mask = o;
  p.object_scores = {0.0, 1.0};
  p.predicate_scores = {conf};
  return p;
}

TEST(AveragePrecision, EnvelopeExamples) {
  EXPECT_DOUBLE_EQ(*vrs::average_precision({0, 1}, 1), 0.5);
  EXPECT_NEAR(*vrs::average_precision({1, 0, 1}, 2), 0.5 + 0.5 * 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(*vrs::average_precision({1, 1}, 4), 0.5);
  EXPECT_DOUBLE_EQ(*vrs::average_precision({}, 3), 0.0);
  EXPECT_FALSE(vrs::average_precision({1}, 0).has_value());
}

TEST(AveragePrecision, AgreesWithOracle) {
  std::mt19937 rng(31);
  for (int t = 0; t < 500; ++t) {
    const int n = testutil::uniform(rng, 0, 30);
    std::vector<char> tp(n);
    std::vector<bool> tpb(n);
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      tp[i] = testutil::coin(rng) ? 1 : 0;
      tpb[i] = tp[i];
      hits += tp[i];
    }
    const int npos = hits + testutil::uniform(rng, 1, 5);
    EXPECT_NEAR(*vrs::average_precision(tp, npos), oracle::envelope_ap(tpb, npos), 1e-12);
  }
}

TEST(HoiMap, DuplicatePredictionIsFalsePositive) {
  const auto s = testutil::rect_mask(8, 8, 0, 0, 4, 4);
  const auto o = testutil::rect_mask(8, 8, 4, 4, 8, 8);
  vrs::Dataset ds;
  ds.catalog = hoi_catalog();
  ds.images.push_back(image("a", s, o));
  ds.images.push_back(image("b", s, o));
  ds.images[0].preds = {scored(s, o, 0.9), scored(s, o, 0.9)};
  ds.images[1].preds = {scored(s, o, 0.5)};
  const auto r = vrs::eval_hoi_map(ds, TpRule{});
  // Ranked: TP, FP (duplicate), TP.
  EXPECT_NEAR(*r.aggregate("mAP_full"), 0.5 + 0.5 * 2.0 / 3.0, 1e-12);
  EXPECT_FALSE(r.aggregate("mAP_rare").has_value());
  ASSERT_EQ(r.flags.size(), 1u);
  EXPECT_EQ(r.counts.at("num_gt"), 2);
}

TEST(HoiMap, ThresholdIsInclusive) {
  const auto g = testutil::rect_mask(4, 4, 0, 0, 4, 2);
  const auto half = testutil::rect_mask(4, 4, 0, 0, 4, 1);  // IoU 0.5
  vrs::Dataset ds;
  ds.catalog = hoi_catalog();
  ds.images.push_back(image("a", g, g));
  ds.images[0].preds = {scored(half, g, 1.0)};
  EXPECT_DOUBLE_EQ(*vrs::eval_hoi_map(ds, TpRule{Localization::kMask, 0.5}).aggregate("mAP_full"), 1.0);
  EXPECT_DOUBLE_EQ(*vrs::eval_hoi_map(ds, TpRule{Localization::kMask, 0.51}).aggregate("mAP_full"), 0.0);
}

TEST(HoiMap, MaskRuleRejectsBoxOnlyPredictions) {
  const auto m = testutil::rect_mask(8, 8, 0, 0, 4, 4);
  vrs::Dataset ds;
  ds.catalog = hoi_catalog();
  ds.images.push_back(image("a", m, m));
  auto p = scored(m, m, 1.0);
  p.subject_mask.reset();
  p.subject_box = vrs::BBox{0, 0, 4, 4};
  ds.images[0].preds = {p};
  EXPECT_EQ(kind_of([&] { vrs::eval_hoi_map(ds, TpRule{}); }), vrs::ErrorKind::kConstraint);
  EXPECT_DOUBLE_EQ(*vrs::eval_hoi_map(ds, TpRule{Localization::kBox, 0.5}).aggregate("mAP_full"), 1.0);
  EXPECT_EQ(kind_of([&] { vrs::eval_hoi_map(ds, TpRule{Localization::kBox, 0.0}); }),
            vrs::ErrorKind::kInvalidArgument);
}

TEST(HoiMap, RarePartitionFromTrainCounts) {
  const auto m = testutil::rect_mask(8, 8, 0, 0, 4, 4);
  vrs::Dataset ds;
  ds.catalog = hoi_catalog();
  ds.catalog.object_names.push_back("ball");
  ds.catalog.relations.push_back({2, 0});
  ds.catalog.train_counts = std::vector<std::int64_t>{3, 50};
  ds.catalog.build_index();
  ds.images.push_back(image("a", m, m));
  ds.images[0].gt.push_back(ds.images[0].gt[0]);
  ds.images[0].gt[1].object->category = 2;
  ds.images[0].gt[1].object->mask = testutil::rect_mask(8, 8, 4, 4, 8, 8);
  auto p = scored(m, m, 1.0);
  p.object_scores = {0.0, 1.0, 0.0};
  ds.images[0].preds = {p};
  const auto r = vrs::eval_hoi_map(ds, TpRule{});
  EXPECT_DOUBLE_EQ(*r.aggregate("mAP_rare"), 1.0);
  EXPECT_DOUBLE_EQ(*r.aggregate("mAP_non_rare"), 0.0);
  EXPECT_DOUBLE_EQ(*r.aggregate("mAP_full"), 0.5);
  const std::string table = vrs::summary_table(r);
  EXPECT_NE(table.find("Non-Rare"), std::string::npos);
  EXPECT_NE(table.find("50.00"), std::string::npos);
}

TEST(HoiMap, AgreesWithOracle) {
  std::mt19937 rng(101);
  for (int t = 0; t < 200; ++t) {
    const auto ds = testutil::micro_dataset(rng, MicroKind::kHoi);
    const double thr = testutil::coin(rng) ? 0.5 : testutil::uniform(rng, 1, 9) / 10.0;
    const std::size_t top_k = testutil::coin(rng) ? 100 : static_cast<std::size_t>(testutil::uniform(rng, 1, 8));
    vrs::HoiMapOptions opts;
    opts.top_k = top_k;
    const auto r = vrs::eval_hoi_map(ds, TpRule{Localization::kMask, thr}, opts);
    const auto o = oracle::hoi_map(ds, thr, top_k);
    EXPECT_NEAR(*r.aggregate("mAP_full"), o.full, kTol);
    for (const auto& row : r.rows) {
      if (row.values.count("AP")) {
        EXPECT_NEAR(row.values.at("AP"), o.ap.at(row.id), kTol);
      }
    }
  }
}

TEST(HoiMap, InvariantUnderUniformScoreScaling) {
  std::mt19937 rng(7);
  for (int t = 0; t < 100; ++t) {
    const auto ds = testutil::micro_dataset(rng, MicroKind::kHoi);
    auto scaled = ds;
    for (auto& rec : scaled.images) {
      for (auto& p : rec.preds) {
        for (auto& s : p.predicate_scores) s *= 0.5;
      }
    }
    const auto a = vrs::eval_hoi_map(ds, TpRule{});
    const auto b = vrs::eval_hoi_map(scaled, TpRule{});
    EXPECT_EQ(a.aggregate("mAP_full"), b.aggregate("mAP_full"));
  }
}

TEST(HoiMap, ThreadCountDoesNotChangeResults) {
  std::mt19937 rng(8);
  for (int t = 0; t < 50; ++t) {
    const auto ds = testutil::micro_dataset(rng, MicroKind::kHoi);
    vrs::HoiMapOptions one, four;
    one.threads = 1;
    four.threads = 4;
    EXPECT_EQ(vrs::to_json(vrs::eval_hoi_map(ds, TpRule{}, one)), vrs::to_json(vrs::eval_hoi_map(ds, TpRule{}, four)));
  }
}

TEST(Protocols, PerfectPredictionsScoreOne) {
  std::mt19937 rng(55);
  for (int t = 0; t < 60; ++t) {
    const auto hoi = perfect(testutil::micro_dataset(rng, MicroKind::kHoi));
    EXPECT_NEAR(*vrs::eval_hoi_map(hoi, TpRule{}).aggregate("mAP_full"), 1.0, 1e-12);
    const auto vcoco = perfect(testutil::micro_dataset(rng, MicroKind::kVcoco));
    EXPECT_NEAR(*vrs::eval_vcoco_role_ap(vcoco, TpRule{}).aggregate("AP_role_S1"), 1.0, 1e-12);
    const auto psg = perfect(testutil::micro_dataset(rng, MicroKind::kPsg));
    const auto r = vrs::eval_psg_recall(psg, TpRule{});
    EXPECT_NEAR(*r.aggregate("R@20"), 1.0, 1e-12);
    EXPECT_NEAR(*r.aggregate("mR@20"), 1.0, 1e-12);
  }
}

TEST(VcocoRoleAp, AgreesWithOracleInBothScenarios) {
  std::mt19937 rng(202);
  for (int t = 0; t < 200; ++t) {
    const auto ds = testutil::micro_dataset(rng, MicroKind::kVcoco);
    const double thr = testutil::uniform(rng, 3, 7) / 10.0;
    vrs::VcocoOptions s1;
    const auto r1 = vrs::eval_vcoco_role_ap(ds, TpRule{Localization::kMask, thr}, s1);
    EXPECT_NEAR(*r1.aggregate("AP_role_S1"), oracle::role_ap(ds, thr, true), kTol);
    EXPECT_EQ(r1.flags.size(), 1u);
    vrs::VcocoOptions s2;
    s2.scenario = vrs::VcocoScenario::kS2;
    bool has_gt = false;
    for (const auto& rec : ds.images) {
      for (const auto& g : rec.gt) {
        for (int p : g.predicates) has_gt = has_gt || !ds.catalog.is_no_object_predicate(p);
      }
    }
    if (has_gt) {
      const auto r2 = vrs::eval_vcoco_role_ap(ds, TpRule{Localization::kMask, thr}, s2);
      EXPECT_NEAR(*r2.aggregate("AP_role_S2"), oracle::role_ap(ds, thr, false), kTol);
    } else {
      EXPECT_EQ(kind_of([&] { vrs::eval_vcoco_role_ap(ds, TpRule{Localization::kMask, thr}, s2); }),
                vrs::ErrorKind::kConstraint);
    }
  }
}

TEST(VcocoRoleAp, NoObjectRoleRequiresNoDeclaredObject) {
  vrs::Dataset ds;
  ds.catalog.kind = vrs::CatalogKind::kVcoco;
  ds.catalog.object_names = {"person", "ball"};
  ds.catalog.predicate_names = {"run", "kick"};
  ds.catalog.no_object_predicates = std::vector<int>{0};
  const auto s = testutil::rect_mask(8, 8, 0, 0, 4, 8);
  vrs::ImageRecord rec;
  rec.image_id = "a";
  rec.height = rec.width = 8;
  vrs::GtTriplet g;
  g.subject = vrs::Entity{0, std::nullopt, s, std::nullopt};
  g.predicates = {0};
  rec.gt.push_back(g);
  vrs::PredTriplet p;
  p.subject_mask = s;
  p.object_scores = {1.0, 0.0};
  p.predicate_scores = {1.0, 0.0};
  rec.preds.push_back(p);
  ds.images.push_back(rec);
  EXPECT_DOUBLE_EQ(*vrs::eval_vcoco_role_ap(ds, TpRule{}).aggregate("AP_role_S1"), 1.0);
  ds.images[0].preds[0].object_mask = testutil::rect_mask(8, 8, 4, 0, 8, 2);
  EXPECT_DOUBLE_EQ(*vrs::eval_vcoco_role_ap(ds, TpRule{}).aggregate("AP_role_S1"), 0.0);
  ds.images[0].preds[0].object_mask = vrs::RleMask::zeros(8, 8);
  EXPECT_DOUBLE_EQ(*vrs::eval_vcoco_role_ap(ds, TpRule{}).aggregate("AP_role_S1"), 1.0);
  ds.catalog.no_object_predicates.reset();
  EXPECT_EQ(kind_of([&] { vrs::eval_vcoco_role_ap(ds, TpRule{}); }), vrs::ErrorKind::kConstraint);
  EXPECT_EQ(vrs::parse_vcoco_scenario("S2"), vrs::VcocoScenario::kS2);
  EXPECT_THROW(vrs::parse_vcoco_scenario("S3"), vrs::Error);
}

TEST(PsgRecall, AgreesWithOracle) {
  std::mt19937 rng(303);
  for (int t = 0; t < 200; ++t) {
    const auto ds = testutil::micro_dataset(rng, MicroKind::kPsg);
    const double thr = testutil::uniform(rng, 3, 7) / 10.0;
    vrs::PsgRecallOptions opts;
    opts.ks = {1, 3, 20};
    const auto r = vrs::eval_psg_recall(ds, TpRule{Localization::kMask, thr}, opts);
    for (int k : opts.ks) {
      const auto o = oracle::psg_recall(ds, thr, static_cast<std::size_t>(k));
      EXPECT_NEAR(*r.aggregate("R@" + std::to_string(k)), o.r, kTol);
      EXPECT_NEAR(*r.aggregate("mR@" + std::to_string(k)), o.mr, kTol);
    }
  }
}

TEST(PsgRecall, MonotoneInK) {
  std::mt19937 rng(404);
  for (int t = 0; t < 100; ++t) {
    const auto ds = testutil::micro_dataset(rng, MicroKind::kPsg);
    vrs::PsgRecallOptions opts;
    opts.ks = {1, 2, 5, 10, 20, 50, 100};
    const auto r = vrs::eval_psg_recall(ds, TpRule{}, opts);
    for (std::size_t i = 1; i < opts.ks.size(); ++i) {
      const auto prev = std::to_string(opts.ks[i - 1]), cur = std::to_string(opts.ks[i]);
      EXPECT_LE(*r.aggregate("R@" + prev), *r.aggregate("R@" + cur));
      EXPECT_LE(*r.aggregate("mR@" + prev), *r.aggregate("mR@" + cur));
    }
  }
}

TEST(PsgRecall, MissWithFewerCandidatesThanK) {
  const auto s = testutil::rect_mask(8, 8, 0, 0, 4, 4);
  const auto o = testutil::rect_mask(8, 8, 4, 4, 8, 8);
  vrs::Dataset ds;
  ds.catalog = hoi_catalog();
  ds.catalog.kind = vrs::CatalogKind::kPsg;
  ds.images.push_back(image("a", s, o));
  auto p = scored(o, s, 1.0);
  p.subject_scores = {1.0, 0.0};
  ds.images[0].preds = {p};
  const auto r = vrs::eval_psg_recall(ds, TpRule{});
  EXPECT_DOUBLE_EQ(*r.aggregate("R@20"), 0.0);
  EXPECT_DOUBLE_EQ(*r.aggregate("mR@100"), 0.0);
  ds.images[0].preds[0].subject_mask = s;
  ds.images[0].preds[0].object_mask = o;
  EXPECT_DOUBLE_EQ(*vrs::eval_psg_recall(ds, TpRule{}).aggregate("R@20"), 1.0);
}

TEST(PsgRecall, RequiresLabelAgreementAndSubjectScores) {
  std::mt19937 rng(5);
  auto ds = perfect(testutil::micro_dataset(rng, MicroKind::kPsg));
  for (auto& rec : ds.images) {
    for (auto& p : rec.preds) std::rotate(p.object_scores.begin(), p.object_scores.begin() + 1, p.object_scores.end());
  }
  EXPECT_DOUBLE_EQ(*vrs::eval_psg_recall(ds, TpRule{}).aggregate("R@100"), 0.0);
  for (auto& rec : ds.images) {
    for (auto& p : rec.preds) p.subject_scores.clear();
  }
  bool any_pred = false;
  for (const auto& rec : ds.images) any_pred = any_pred || !rec.preds.empty();
  if (any_pred) {
    EXPECT_EQ(kind_of([&] { vrs::eval_psg_recall(ds, TpRule{}); }), vrs::ErrorKind::kConstraint);
  }
  vrs::PsgRecallOptions bad;
  bad.ks = {0};
  EXPECT_THROW(vrs::eval_psg_recall(ds, TpRule{}, bad), vrs::Error);
}

TEST(Siou, FirstPairAndMissingPredictions) {
  const auto s = testutil::rect_mask(8, 8, 0, 0, 4, 4);
  const auto o = testutil::rect_mask(8, 8, 4, 4, 8, 8);
  vrs::Dataset ds;
  ds.catalog = hoi_catalog();
  ds.images.push_back(image("a", s, o));
  ds.images.push_back(image("b", s, o));
  ds.images.push_back(image("c", s, o));
  ds.images[2].gt.clear();
  ds.images[0].preds = {scored(s, testutil::rect_mask(8, 8, 4, 4, 8, 6), 1.0), scored(o, o, 1.0)};
  const auto r = vrs::eval_siou(ds);
  EXPECT_DOUBLE_EQ(*r.aggregate("S-IoU"), 0.5);
  EXPECT_DOUBLE_EQ(*r.aggregate("O-IoU"), 0.25);
  EXPECT_EQ(r.counts.at("num_missing"), 1);
  EXPECT_EQ(r.counts.at("num_skipped"), 1);
  EXPECT_EQ(r.flags.size(), 1u);
}

TEST(Fairness, MaskToBoxOnLShape) {
  // L-shaped masks: pixel IoU differs from box IoU.
  vrs::Bitmap b(8, 8);
  for (int y = 0; y < 8; ++y) b.set(0, y);
  for (int x = 0; x < 8; ++x) b.set(x, 7);
  const auto ell = vrs::rle_encode(b);
  vrs::Dataset ds;
  ds.catalog = hoi_catalog();
  ds.images.push_back(image("a", ell, ell));
  ds.images[0].gt[0].subject.box = vrs::BBox{0, 0, 8, 8};
  ds.images[0].gt[0].object->box = vrs::BBox{0, 0, 8, 8};
  ds.images[0].preds = {scored(ell, ell, 1.0)};

  const auto boxes = vrs::transform_for_fairness(ds, vrs::FairnessDirection::kMaskToBox);
  ASSERT_TRUE(boxes.errors.empty());
  const auto& p = boxes.dataset.images[0].preds[0];
  EXPECT_FALSE(p.subject_mask.has_value());
  EXPECT_EQ(*p.subject_box, (vrs::BBox{0, 0, 8, 8}));
  EXPECT_DOUBLE_EQ(*vrs::eval_siou(boxes.dataset, Localization::kBox).aggregate("S-IoU"), 1.0);
  EXPECT_EQ(kind_of([&] { vrs::eval_siou(boxes.dataset, Localization::kMask); }), vrs::ErrorKind::kConstraint);

  const auto filled = vrs::transform_for_fairness(boxes.dataset, vrs::FairnessDirection::kBoxToMask,
                                                  vrs::box_fill_masks());
  ASSERT_TRUE(filled.errors.empty());
  EXPECT_DOUBLE_EQ(*vrs::eval_siou(filled.dataset, Localization::kMask).aggregate("S-IoU"), 15.0 / 64.0);
  EXPECT_DOUBLE_EQ(*vrs::eval_siou(ds, Localization::kMask).aggregate("S-IoU"), 1.0);
}

TEST(Fairness, FailuresAreListedAndRemoved) {
  const auto m = testutil::rect_mask(8, 8, 0, 0, 4, 4);
  vrs::Dataset ds;
  ds.catalog = hoi_catalog();
  ds.images.push_back(image("a", m, m));
  auto empty_sub = scored(vrs::RleMask::zeros(8, 8), m, 1.0);
  auto no_obj = scored(m, vrs::RleMask::zeros(8, 8), 1.0);
  ds.images[0].preds = {empty_sub, no_obj};
  const auto r = vrs::transform_for_fairness(ds, vrs::FairnessDirection::kMaskToBox);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].pred_index, 0u);
  ASSERT_EQ(r.dataset.images[0].preds.size(), 1u);
  EXPECT_FALSE(r.dataset.images[0].preds[0].declares_object());

  auto boxed = r.dataset;
  boxed.images[0].preds[0].object_box = vrs::BBox{0, 0, 2, 2};
  const auto none = vrs::transform_for_fairness(
      boxed, vrs::FairnessDirection::kBoxToMask,
      [](const vrs::ImageRecord&, std::size_t, bool subject, const vrs::BBox&) -> std::optional<vrs::RleMask> {
        if (subject) return vrs::RleMask::zeros(8, 8);
        return std::nullopt;
      });
  ASSERT_EQ(none.errors.size(), 1u);
  EXPECT_TRUE(none.dataset.images[0].preds.empty());
  EXPECT_THROW(vrs::transform_for_fairness(boxed, vrs::FairnessDirection::kBoxToMask), vrs::Error);
}

TEST(Reports, MeanOfRowsAndJson) {
  std::vector<vrs::ReportRow> rows(3);
  for (int i = 0; i < 3; ++i) rows[i].id = i;
  rows[0].values["AP"] = 0.2;
  rows[2].values["AP"] = 0.6;
  EXPECT_NEAR(*vrs::mean_of_rows(rows, "AP"), 0.4, 1e-15);
  const std::vector<int> ids{1};
  EXPECT_FALSE(vrs::mean_of_rows(rows, "AP", &ids).has_value());
  vrs::EvalReport r;
  r.protocol = "x";
  r.rows = rows;
  r.aggregates["A"] = std::nullopt;
  const auto j = vrs::to_json(r);
  EXPECT_TRUE(j["aggregates"]["A"].is_null());
  EXPECT_EQ(j["rows"].size(), 3u);
}

TEST(Fixtures, PerfectFixturePredictionsScoreOne) {
  const auto load = [](const std::string& prefix) {
    const auto cat = vrs::load_catalog(testutil::fixture(prefix + "_catalog.json"));
    auto ds = vrs::load_gt(testutil::fixture(prefix + "_gt.jsonl"), cat);
    auto preds = vrs::load_preds(testutil::fixture(prefix + "_preds.jsonl"), cat);
    if (!cat.no_interaction_name.empty()) {
      vrs::drop_predicate_column(preds, *cat.predicate_index(cat.no_interaction_name));
    }
    vrs::attach_preds(ds, std::move(preds));
    return ds;
  };
  EXPECT_DOUBLE_EQ(*vrs::eval_hoi_map(load("hico"), TpRule{}).aggregate("mAP_full"), 1.0);
  EXPECT_DOUBLE_EQ(*vrs::eval_vcoco_role_ap(load("vcoco"), TpRule{}).aggregate("AP_role_S1"), 1.0);
  EXPECT_DOUBLE_EQ(*vrs::eval_psg_recall(load("psg"), TpRule{}).aggregate("R@20"), 1.0);
}

}  // namespace
