// Copyright 2026 The LongSeq Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "longseq/core/error.h"
#include "longseq/core/random.h"
#include "longseq/search/search.h"
#include "longseq/trajectory/vocab.h"
#include "support/model_fixtures.h"
#include "support/search_oracle.h"

using namespace longseq;
using namespace longseq::testing;

TEST_CASE("hard search follows the staged fixture") {
  Trajectory t;
  t.events = {
      event(100, "c1", "c12", "c123"),                             // 0: L3 match
      event(600, "c9", "c91", "c911", ActionScenario::kVideo),     // 1: unrelated
      event(300, "c1", "c12", "c124"),                             // 2: L2 match
      event(500, "c1", "c12", "c123"),                             // 3: L3 match, newer
      event(400, "c8", "c81", "c811", ActionScenario::kChannels),  // 4: union scenario
      event(700, "c7", "c71", "c711"),                             // 5: unrelated, newest
  };
  const TargetAd target = target_for(1000, "c1", "c12", "c123");
  SearchConfig cfg;
  cfg.k = 4;
  cfg.union_scenarios = {ActionScenario::kChannels};

  const auto got = hard_search(t, target, cfg);
  CHECK(indices(got) == std::vector<std::size_t>{3, 0, 2, 4});
  REQUIRE(got.size() == 4);
  CHECK(got[0].stage == SearchStage::kCategoryL3);
  CHECK(got[1].stage == SearchStage::kCategoryL3);
  CHECK(got[2].stage == SearchStage::kCategoryL2);
  CHECK(got[3].stage == SearchStage::kUnion);
  CHECK(got == reference_hard_search(t, target, cfg));

  cfg.k = 10;
  CHECK(indices(hard_search(t, target, cfg)) == std::vector<std::size_t>{3, 0, 2, 4, 5, 1});
  cfg.fill_latest = false;
  CHECK(indices(hard_search(t, target, cfg)) == std::vector<std::size_t>{3, 0, 2, 4});
}

TEST_CASE("hard search edge cases") {
  const TargetAd target = target_for(1000, "c1", "", "");
  SearchConfig cfg;
  cfg.k = 3;
  CHECK(hard_search(Trajectory{}, target, cfg).empty());

  Trajectory t;
  for (int i = 0; i < 5; ++i) t.events.push_back(event(100 + i, "c2", "", ""));
  cfg.k = 10;
  // Nothing matches the category, so everything arrives through the fill, newest first.
  const auto all = hard_search(t, target, cfg);
  CHECK(indices(all) == std::vector<std::size_t>{4, 3, 2, 1, 0});
  for (const Selection& s : all) CHECK(s.stage == SearchStage::kLatest);

  cfg.k = 0;
  CHECK_THROWS_AS(hard_search(t, target, cfg), ConfigError);
  cfg.k = 2;
  cfg.level_order = {4};
  CHECK_THROWS_AS(hard_search(t, target, cfg), ConfigError);
  cfg.level_order = {};
  CHECK_THROWS_AS(hard_search(t, target, cfg), ConfigError);
}

TEST_CASE("hard search matches the staged reference on 1000 random instances") {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const Trajectory t = random_trajectory(rng, rng.below(25));
    std::string l1, l2, l3;
    random_path(rng, l1, l2, l3);
    const TargetAd target = target_for(99999, l1, l2, l3);
    SearchConfig cfg;
    cfg.k = 1 + rng.below(12);
    cfg.level_order.clear();
    for (int level : {3, 2, 1}) {
      if (rng.bernoulli(0.7)) cfg.level_order.push_back(level);
    }
    if (cfg.level_order.empty()) cfg.level_order = {1};
    rng.shuffle(cfg.level_order);
    if (rng.bernoulli(0.5)) cfg.union_action_types = {kAllActionTypes[rng.below(kAllActionTypes.size())]};
    if (rng.bernoulli(0.5)) cfg.union_scenarios = {kAllScenarios[rng.below(kAllScenarios.size())]};
    cfg.fill_latest = rng.bernoulli(0.5);

    const auto got = hard_search(t, target, cfg);
    REQUIRE(got == reference_hard_search(t, target, cfg));
    CHECK(got == hard_search(t, target, cfg));
    const std::vector<std::size_t> idx = indices(got);
    const std::set<std::size_t> unique(idx.begin(), idx.end());
    CHECK(unique.size() == got.size());
    for (std::size_t i : unique) CHECK(i < t.events.size());
    if (cfg.fill_latest) CHECK(got.size() == std::min(cfg.k, t.events.size()));
  }
}

TEST_CASE("single-level hard search is the plain category filter") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Trajectory t = random_trajectory(rng, 20);
    const TargetAd target = target_for(99999, "c0", "c01", "c010");
    SearchConfig cfg;
    cfg.k = 1 + rng.below(20);
    cfg.level_order = {3};
    cfg.fill_latest = false;
    std::vector<std::size_t> direct;
    for (std::size_t i = 0; i < t.events.size(); ++i) {
      if (t.events[i].side.cat_l3 == "c010") direct.push_back(i);
    }
    const auto got = indices(hard_search(t, target, cfg));
    CHECK(got.size() == std::min(cfg.k, direct.size()));
    for (std::size_t i : got) {
      CHECK(std::find(direct.begin(), direct.end(), i) != direct.end());
    }
  }
}

TEST_CASE("stratified quotas reproduce the worked example") {
  const auto q = stratified_quotas({{"A", 6}, {"B", 3}, {"C", 1}}, 5);
  CHECK(q == std::map<std::string, std::size_t>{{"A", 3}, {"B", 1}, {"C", 1}});
  CHECK(best_quota_objective({6, 3, 1}, 5) ==
        doctest::Approx(quota_objective({3.0, 1.5, 0.5}, {3, 1, 1})));
  // Fewer slots than categories: the largest categories, ties by id.
  CHECK(stratified_quotas({{"A", 2}, {"B", 5}, {"C", 2}}, 2) ==
        std::map<std::string, std::size_t>{{"A", 1}, {"B", 1}});
  // Quota beyond a category's size spills over.
  CHECK(stratified_quotas({{"A", 1}, {"B", 9}}, 8) ==
        std::map<std::string, std::size_t>{{"A", 1}, {"B", 7}});
  CHECK_THROWS_AS(stratified_quotas({{"A", 1}}, 0), ConfigError);
}

TEST_CASE("stratified quotas match the brute-force enumerator on 1000 instances") {
  Rng rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 1 + rng.below(5);
    std::map<std::string, std::size_t> counts;
    std::vector<std::size_t> n;
    for (std::size_t j = 0; j < m; ++j) {
      n.push_back(1 + rng.below(7));
      counts["c" + std::to_string(j)] = n.back();
    }
    const std::size_t total = std::accumulate(n.begin(), n.end(), std::size_t{0});
    const std::size_t k = 1 + rng.below(total + 3);
    const auto q = stratified_quotas(counts, k);

    std::size_t sum = 0;
    for (const auto& [id, v] : q) {
      CHECK(v >= 1);
      CHECK(v <= counts.at(id));
      sum += v;
    }
    CHECK(sum == std::min(k, total));
    if (k >= m) {
      REQUIRE(q.size() == m);
      std::vector<std::size_t> qv;
      std::vector<double> ideal;
      for (std::size_t j = 0; j < m; ++j) {
        qv.push_back(q.at("c" + std::to_string(j)));
        ideal.push_back(static_cast<double>(k) * n[j] / total);
      }
      CHECK(quota_objective(ideal, qv) == doctest::Approx(best_quota_objective(n, k)).epsilon(1e-12));
    } else {
      // Exactly k categories, and none left out is larger than one taken.
      CHECK(q.size() == k);
      std::size_t smallest_in = std::numeric_limits<std::size_t>::max(), largest_out = 0;
      for (const auto& [id, nj] : counts) {
        if (q.count(id)) {
          smallest_in = std::min(smallest_in, nj);
        } else {
          largest_out = std::max(largest_out, nj);
        }
      }
      CHECK(smallest_in >= largest_out);
    }
  }
}

TEST_CASE("stratified sample takes the newest events of each category") {
  Trajectory t;
  for (int i = 0; i < 6; ++i) t.events.push_back(event(100 + i, "A", "", ""));
  for (int i = 0; i < 3; ++i) t.events.push_back(event(200 + i, "B", "", ""));
  t.events.push_back(event(50, "", "", ""));
  const auto got = stratified_sample(t, 5, 1);
  // A gets 3 (indices 5, 4, 3), B gets 1 (index 8), "__none__" gets 1 (index 9).
  CHECK(indices(got) == std::vector<std::size_t>{8, 5, 4, 3, 9});
  CHECK(stratum_of(t.events[9], 1) == "__none__");

  CHECK(indices(stratified_sample(t, 50, 1)).size() == t.events.size());
  Trajectory single;
  for (int i = 0; i < 6; ++i) single.events.push_back(event(100 + i, "A", "", ""));
  CHECK(indices(stratified_sample(single, 2, 1)) == std::vector<std::size_t>{5, 4});
  CHECK(stratified_sample(Trajectory{}, 3, 1).empty());
  CHECK_THROWS_AS(stratified_sample(t, 3, 0), ConfigError);
}

TEST_CASE("stratified sample covers every category when k >= m") {
  Rng rng(14);
  for (int trial = 0; trial < 300; ++trial) {
    const Trajectory t = random_trajectory(rng, 1 + rng.below(30));
    const int level = 1 + static_cast<int>(rng.below(3));
    std::set<std::string> cats;
    for (const BehaviorEvent& e : t.events) cats.insert(stratum_of(e, level));
    const std::size_t k = cats.size() + rng.below(10);
    const auto got = stratified_sample(t, k, level);
    CHECK(got.size() == std::min(k, t.events.size()));
    std::set<std::string> seen;
    for (const Selection& s : got) seen.insert(stratum_of(t.events[s.index], level));
    CHECK(seen == cats);
    for (std::size_t j = 1; j < got.size(); ++j) {
      CHECK(t.events[got[j - 1].index].timestamp >= t.events[got[j].index].timestamp);
    }
  }
}

TEST_CASE("soft search matches exhaustive logit scoring on 1000 instances") {
  Rng rng(15);
  const ModelKind kinds[] = {ModelKind::kTin, ModelKind::kDare, ModelKind::kStin};
  for (int trial = 0; trial < 1000; ++trial) {
    Trajectory t = random_trajectory(rng, 1 + rng.below(12));
    for (BehaviorEvent& e : t.events) e.timestamp += static_cast<std::int64_t>(rng.below(20)) * 86400;
    std::string l1, l2, l3;
    random_path(rng, l1, l2, l3);
    const TargetAd target = target_for(1000 + 30 * 86400, l1, l2, l3);

    ModelConfig cfg = testing::small_config(kinds[trial % 3]);
    cfg.temporal_mode = rng.bernoulli(0.5) ? TemporalMode::kDecoupled : TemporalMode::kShared;
    cfg.use_temporal = rng.bernoulli(0.8);
    cfg.share_spaces = rng.bernoulli(0.3);
    const VocabMap vocab = [&] {
      VocabMap v = build_vocab(t.events, cfg.fields, {target});
      v.freeze();
      return v;
    }();
    auto model = make_model(cfg, vocab, 100 + trial);
    testing::randomize(model->params(), rng);

    SoftSearchConfig sc;
    sc.k = 1 + rng.below(t.events.size() + 2);
    sc.use_attention_space = rng.bernoulli(0.7);
    const auto got = soft_search(t, target, soft_search_context(*model, vocab), sc);
    const auto logits = reference_logits(*model, vocab, t, target, sc.use_attention_space);

    std::vector<std::size_t> order(t.events.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (logits[a] != logits[b]) return logits[a] > logits[b];
      if (t.events[a].timestamp != t.events[b].timestamp) {
        return t.events[a].timestamp > t.events[b].timestamp;
      }
      return a < b;
    });
    REQUIRE(got.size() == std::min(sc.k, t.events.size()));
    for (std::size_t j = 0; j < got.size(); ++j) {
      CHECK(got[j].score == doctest::Approx(logits[got[j].index]).epsilon(1e-9));
      // Near-ties may legitimately swap under rounding; compare scores there.
      if (got[j].index != order[j]) CHECK(std::abs(logits[got[j].index] - logits[order[j]]) < 1e-12);
    }
  }
}

TEST_CASE("soft search with identical behaviors keeps the most recent") {
  ModelConfig cfg = testing::small_config(ModelKind::kDare);
  cfg.use_temporal = false;
  Trajectory t;
  for (int i = 0; i < 5; ++i) {
    BehaviorEvent e = event(100 + (i % 3), "c1", "", "");
    e.item_id = "same";
    t.events.push_back(e);
  }
  const TargetAd target = target_for(1000, "c1", "", "");
  VocabMap vocab = build_vocab(t.events, cfg.fields, {target});
  vocab.freeze();
  auto model = make_model(cfg, vocab, 3);
  SoftSearchConfig sc;
  sc.k = 3;
  // Timestamps 100, 101, 102, 100, 101: newest first, then input order.
  CHECK(indices(soft_search(t, target, soft_search_context(*model, vocab), sc)) ==
        std::vector<std::size_t>{2, 1, 4});
  CHECK(soft_search(Trajectory{}, target, soft_search_context(*model, vocab), sc).empty());
  sc.k = 0;
  CHECK_THROWS_AS(soft_search(t, target, soft_search_context(*model, vocab), sc), ConfigError);

  ModelConfig sas = testing::small_config(ModelKind::kSasrec);
  auto sm = make_model(sas, vocab, 3);
  CHECK_THROWS_AS(soft_search_context(*sm, vocab), ConfigError);
}

TEST_CASE("search results are pure functions of their inputs") {
  Rng rng(16);
  const Trajectory t = random_trajectory(rng, 30);
  const TargetAd target = target_for(99999, "c1", "c10", "c101");
  SearchConfig cfg;
  cfg.k = 7;
  cfg.union_action_types = {ActionType::kClick};
  const auto a = hard_search(t, target, cfg), b = hard_search(t, target, cfg);
  CHECK(a == b);
  CHECK(selection_hash(a) == selection_hash(b));
  CHECK(stratified_sample(t, 6, 2) == stratified_sample(t, 6, 2));
  const auto ev = selected_events(t, a);
  REQUIRE(ev.size() == a.size());
  CHECK(ev[0].timestamp == t.events[a[0].index].timestamp);
}
