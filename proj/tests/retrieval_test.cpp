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
#include <set>

#include "test_util.hpp"
#include "vrseval/io.hpp"
#include "vrseval/retrieval.hpp"

namespace {

using vrs::Slot;

std::string parse_error_of(const std::string& text) {
  try {
    vrs::parse_prompt(text);
  } catch (const vrs::Error& e) {
    EXPECT_EQ(e.kind(), vrs::ErrorKind::kParse);
    return e.message();
  }
  ADD_FAILURE() << "accepted: " << text;
  return "";
}

vrs::CategoryCatalog vocab() {
  vrs::CategoryCatalog c;
  c.kind = vrs::CatalogKind::kVrd;
  c.object_names = {"person", "horse", "hat", "cup"};
  c.predicate_names = {"ride", "wear", "hold"};
  return c;
}

TEST(PromptGrammar, AcceptsEverySubsetInAnyOrder) {
  const auto full = vrs::parse_prompt("<s>person</s><p>ride</p><o>horse</o>");
  EXPECT_EQ(full.subject->text, "person");
  EXPECT_EQ(full.predicate->text, "ride");
  EXPECT_EQ(full.object->text, "horse");
  EXPECT_EQ(full.order, (std::vector<Slot>{Slot::kSubject, Slot::kPredicate, Slot::kObject}));

  const auto two = vrs::parse_prompt("  <o> hat </o> <s>person</s> ");
  EXPECT_FALSE(two.has(Slot::kPredicate));
  EXPECT_EQ(two.object->text, "hat");
  EXPECT_EQ(two.order, (std::vector<Slot>{Slot::kObject, Slot::kSubject}));

  const auto one = vrs::parse_prompt("<p>sitting on</p>");
  EXPECT_EQ(one.predicate->text, "sitting on");
  EXPECT_EQ(one.order.size(), 1u);
}

TEST(PromptGrammar, RejectsMalformedInputWithPositions) {
  EXPECT_NE(parse_error_of("").find("empty prompt"), std::string::npos);
  EXPECT_NE(parse_error_of("   ").find("empty prompt"), std::string::npos);
  EXPECT_NE(parse_error_of("person").find("position 0"), std::string::npos);
  EXPECT_NE(parse_error_of("<s>person</s>x").find("position 13"), std::string::npos);
  EXPECT_NE(parse_error_of("<x>a</x>").find("unknown tag"), std::string::npos);
  EXPECT_NE(parse_error_of("<s>a</s><s>b</s>").find("repeated"), std::string::npos);
  EXPECT_NE(parse_error_of("<s>a").find("missing </s>"), std::string::npos);
  EXPECT_NE(parse_error_of("<s><p>a</p></s>").find("inside a slot"), std::string::npos);
  EXPECT_NE(parse_error_of("<o>  </o>").find("empty <o>"), std::string::npos);
  EXPECT_NE(parse_error_of("<s>a</p>").find("missing </s>"), std::string::npos);
  EXPECT_NE(parse_error_of("<s").find("malformed"), std::string::npos);
}

TEST(PromptGrammar, RenderRoundTrips) {
  const std::vector<std::string> names{"person", "horse", "sitting on", "a b c"};
  std::mt19937 rng(21);
  for (int t = 0; t < 200; ++t) {
    std::vector<Slot> slots{Slot::kSubject, Slot::kPredicate, Slot::kObject};
    std::shuffle(slots.begin(), slots.end(), rng);
    slots.resize(testutil::uniform(rng, 1, 3));
    std::string text;
    for (Slot s : slots) {
      const char tag = vrs::slot_tag(s);
      text += std::string("<") + tag + ">" + names[testutil::uniform(rng, 0, 3)] + "</" + tag + ">";
    }
    const auto q = vrs::parse_prompt(text);
    EXPECT_EQ(vrs::render_prompt(q), text);
    EXPECT_EQ(vrs::parse_prompt(vrs::render_prompt(q)).order, q.order);
  }
}

TEST(PromptGrammar, ResolveKeepsUnknownNamesFreeForm) {
  const auto q = vrs::resolve_prompt(vrs::parse_prompt("<p>ride</p><o>unicorn</o>"), vocab());
  EXPECT_EQ(q.predicate->id, 0);
  EXPECT_FALSE(q.object->id.has_value());
}

vrs::PredTriplet random_pred(std::mt19937& rng, int dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  vrs::PredTriplet p;
  for (auto* e : {&p.subject_embed, &p.predicate_embed, &p.object_embed}) {
    e->resize(static_cast<std::size_t>(dim));
    for (auto& v : *e) v = std::round(n(rng) * 4.0) / 4.0;
  }
  p.subject_scores = testutil::random_scores(rng, 4);
  p.object_scores = testutil::random_scores(rng, 4);
  p.predicate_scores = testutil::random_scores(rng, 3);
  return p;
}

TEST(Compose, SumsExactlyTheFilledSlots) {
  std::mt19937 rng(4);
  const auto p = random_pred(rng, 5);
  const auto so = vrs::compose_triplet_embedding(p, vrs::parse_prompt("<o>x</o><s>y</s>"));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(so[i], p.subject_embed[i] + p.object_embed[i]);
  const auto only_p = vrs::compose_triplet_embedding(p, vrs::parse_prompt("<p>x</p>"));
  EXPECT_EQ(only_p, p.predicate_embed);
  auto missing = p;
  missing.object_embed.clear();
  try {
    vrs::compose_triplet_embedding(missing, vrs::parse_prompt("<o>x</o>"));
    FAIL();
  } catch (const vrs::Error& e) {
    EXPECT_EQ(e.kind(), vrs::ErrorKind::kConstraint);
  }
}

TEST(Compose, SimilarityIsLinearInTheSlots) {
  std::mt19937 rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto p = random_pred(rng, 6);
    const auto prompt = random_pred(rng, 6).subject_embed;
    const auto full = vrs::compose_triplet_embedding(p, vrs::parse_prompt("<s>a</s><p>b</p><o>c</o>"));
    const double sum = vrs::dot(p.subject_embed, prompt) + vrs::dot(p.predicate_embed, prompt) +
                       vrs::dot(p.object_embed, prompt);
    EXPECT_NEAR(vrs::similarity(full, prompt), sum, 1e-9);
    const double c = vrs::similarity(full, prompt, {true});
    EXPECT_LE(std::abs(c), 1.0 + 1e-12);
  }
}

TEST(Rank, MatchesFullSortOracle) {
  std::mt19937 rng(6);
  for (int t = 0; t < 100; ++t) {
    std::vector<vrs::PredTriplet> preds;
    for (int i = 0; i < 50; ++i) preds.push_back(random_pred(rng, 4));
    auto q = vrs::resolve_prompt(vrs::parse_prompt("<s>person</s><p>ride</p>"), vocab());
    vrs::PromptFeature f{random_pred(rng, 4).object_embed, q.order};
    const int k = testutil::uniform(rng, 1, 60);
    const auto ranked = vrs::rank_by_similarity(preds, f, q, k);

    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      double s = 0.0;
      for (std::size_t d = 0; d < 4; ++d) s += (preds[i].subject_embed[d] + preds[i].predicate_embed[d]) * f.vector[d];
      all.emplace_back(-s, i);
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect;
    for (std::size_t i = 0; i < std::min<std::size_t>(k, all.size()); ++i) expect.push_back(all[i].second);
    EXPECT_EQ(ranked, expect);

    const auto kept = vrs::filter_topk_by_slots(preds, ranked, q);
    std::size_t cursor = 0;
    for (std::size_t i : kept) {
      while (cursor < ranked.size() && ranked[cursor] != i) ++cursor;
      ASSERT_LT(cursor, ranked.size()) << "filter output not an ordered subsequence";
      EXPECT_TRUE(vrs::agrees_with_slots(preds[i], q));
    }
    for (std::size_t i : ranked) {
      if (vrs::agrees_with_slots(preds[i], q)) {
        EXPECT_NE(std::find(kept.begin(), kept.end(), i), kept.end());
      }
    }
    EXPECT_EQ(vrs::retrieve(preds, f, q, k), kept);
  }
}

TEST(Rank, RejectsBadArguments) {
  std::mt19937 rng(7);
  std::vector<vrs::PredTriplet> preds{random_pred(rng, 3)};
  const auto q = vrs::parse_prompt("<s>a</s>");
  EXPECT_THROW(vrs::rank_by_similarity(preds, {{1, 2, 3}, q.order}, q, 0), vrs::Error);
  EXPECT_THROW(vrs::rank_by_similarity(preds, {{1, 2}, q.order}, q, 1), vrs::Error);
  EXPECT_THROW(vrs::rank_by_similarity(preds, {{}, q.order}, q, 1), vrs::Error);
  EXPECT_THROW(vrs::filter_topk_by_slots(preds, {3}, q), vrs::Error);
}

TEST(Slots, ArgmaxAgreementAndOmittedSubjectHead) {
  vrs::PredTriplet p;
  p.subject_scores = {0.1, 0.9, 0.0, 0.0};
  p.object_scores = {0.0, 0.0, 0.8, 0.2};
  p.predicate_scores = {0.1, 0.7, 0.2};
  const auto cat = vocab();
  auto q = [&](const std::string& s) { return vrs::resolve_prompt(vrs::parse_prompt(s), cat); };
  EXPECT_TRUE(vrs::agrees_with_slots(p, q("<s>horse</s><p>wear</p><o>hat</o>")));
  EXPECT_FALSE(vrs::agrees_with_slots(p, q("<s>person</s>")));
  EXPECT_FALSE(vrs::agrees_with_slots(p, q("<o>cup</o>")));
  EXPECT_TRUE(vrs::agrees_with_slots(p, q("<o>unicorn</o><p>fly</p>")));
  p.subject_scores.clear();
  EXPECT_TRUE(vrs::agrees_with_slots(p, q("<s>person</s>")));
}

TEST(Baseline, AgreesWithRetrievalWhenKCoversEverything) {
  std::mt19937 rng(9);
  for (int t = 0; t < 100; ++t) {
    std::vector<vrs::PredTriplet> preds;
    const int n = testutil::uniform(rng, 1, 50);
    for (int i = 0; i < n; ++i) preds.push_back(random_pred(rng, 4));
    const auto q = vrs::resolve_prompt(vrs::parse_prompt("<p>hold</p><o>cup</o>"), vocab());
    vrs::PromptFeature f{random_pred(rng, 4).subject_embed, q.order};
    auto a = vrs::retrieve(preds, f, q, n);
    auto b = vrs::postprocess_baseline(preds, q, n);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
  }
}

TEST(Baseline, DivergesWhenTheConfidentTripletIsNotPrompted) {
  vrs::PredTriplet ride, wear;
  ride.subject_scores = {1.0, 0, 0, 0};
  ride.object_scores = {0, 1.0, 0, 0};
  ride.predicate_scores = {1.0, 0, 0};
  ride.subject_embed = {1, 0, 0};
  ride.predicate_embed = {0, 1, 0};
  ride.object_embed = {0, 1, 0};
  wear.subject_scores = {0.9, 0, 0, 0.1};
  wear.object_scores = {0, 0, 0.9, 0.1};
  wear.predicate_scores = {0, 0.9, 0.1};
  wear.subject_embed = {1, 0, 0};
  wear.predicate_embed = {0, 0, 1};
  wear.object_embed = {0, 0, 1};
  const std::vector<vrs::PredTriplet> preds{ride, wear};
  const auto q = vrs::resolve_prompt(vrs::parse_prompt("<s>person</s><o>hat</o>"), vocab());
  const vrs::PromptFeature f{{1, 0, 1}, q.order};
  EXPECT_EQ(vrs::retrieve(preds, f, q, 1), (std::vector<std::size_t>{1}));
  EXPECT_TRUE(vrs::postprocess_baseline(preds, q, 1).empty());
  EXPECT_DOUBLE_EQ(vrs::standard_confidence(wear), 0.9 * 0.9 * 0.9);
}

TEST(PromptFile, FixtureLinesAndErrors) {
  const auto cat = vrs::load_catalog(testutil::fixture("vrd_catalog.json"));
  const auto prompts = vrs::load_prompts(testutil::fixture("vrd_prompts.tsv"), cat);
  ASSERT_EQ(prompts.size(), 3u);
  EXPECT_EQ(prompts[0].image_id, "vrd_0001");
  ASSERT_TRUE(prompts[0].feature.has_value());
  EXPECT_EQ(prompts[0].feature->vector.size(), 4u);
  EXPECT_TRUE(prompts[0].query.subject->id.has_value());
  EXPECT_FALSE(prompts[2].query.object->id.has_value());

  EXPECT_THROW(vrs::parse_prompt_line("no tab here"), vrs::Error);
  EXPECT_THROW(vrs::parse_prompt_line("\t<s>a</s>"), vrs::Error);
  EXPECT_THROW(vrs::parse_prompt_line("a\t<s>a</s>\t[1, \"x\"]"), vrs::Error);
  EXPECT_FALSE(vrs::parse_prompt_line("a\t<s>a</s>").feature.has_value());
}

TEST(PromptFile, GroundTruthMatchesKnownSlots) {
  vrs::GtTriplet g;
  g.subject.category = 0;
  g.object = vrs::Entity{2, vrs::BBox{0, 0, 1, 1}, std::nullopt, std::nullopt};
  g.predicates = {1, 2};
  const auto cat = vocab();
  auto q = [&](const std::string& s) { return vrs::resolve_prompt(vrs::parse_prompt(s), cat); };
  EXPECT_TRUE(vrs::gt_matches_query(g, q("<s>person</s><p>wear</p><o>hat</o>")));
  EXPECT_TRUE(vrs::gt_matches_query(g, q("<p>hold</p>")));
  EXPECT_FALSE(vrs::gt_matches_query(g, q("<p>ride</p>")));
  EXPECT_FALSE(vrs::gt_matches_query(g, q("<o>horse</o>")));
  EXPECT_TRUE(vrs::gt_matches_query(g, q("<o>unicorn</o>")));
}

}  // namespace
