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

#include "longseq/search/search.h"

#include <algorithm>
#include <numeric>

#include "longseq/core/error.h"
#include "longseq/core/ops.h"
#include "longseq/models/sample.h"
#include "longseq/trajectory/taxonomy.h"

namespace longseq {

std::string_view to_string(SearchStage stage) {
  switch (stage) {
    case SearchStage::kCategoryL3:
      return "cat_l3";
    case SearchStage::kCategoryL2:
      return "cat_l2";
    case SearchStage::kCategoryL1:
      return "cat_l1";
    case SearchStage::kUnion:
      return "union";
    case SearchStage::kLatest:
      return "latest";
    case SearchStage::kSoft:
      return "soft";
    case SearchStage::kStratified:
      return "stratified";
  }
  return "?";
}

void SearchConfig::validate() const {
  if (k < 1) throw ConfigError("search k must be >= 1");
  if (level_order.empty()) throw ConfigError("search level_order must not be empty");
  for (int l : level_order) {
    if (l < 1 || l > 3) throw ConfigError("search level " + std::to_string(l) + " is not 1, 2 or 3");
  }
}

namespace {

SearchStage level_stage(int level) {
  return level == 3 ? SearchStage::kCategoryL3
                    : level == 2 ? SearchStage::kCategoryL2 : SearchStage::kCategoryL1;
}

bool newer(const std::vector<BehaviorEvent>& ev, std::size_t a, std::size_t b) {
  if (ev[a].timestamp != ev[b].timestamp) return ev[a].timestamp > ev[b].timestamp;
  return a < b;
}

}  // namespace

std::vector<Selection> hard_search(const Trajectory& traj, const TargetAd& target,
                                   const SearchConfig& cfg) {
  cfg.validate();
  const auto& ev = traj.events;
  const std::vector<std::size_t> recency = recency_order(ev);
  std::vector<std::uint8_t> taken(ev.size(), 0);
  std::vector<Selection> out;

  auto sweep = [&](SearchStage stage, auto&& match) {
    for (std::size_t i : recency) {
      if (out.size() >= cfg.k) return;
      if (!taken[i] && match(ev[i])) {
        taken[i] = 1;
        out.push_back({i, stage, 0.0});
      }
    }
  };

  for (int level : cfg.level_order) {
    const std::string& want = target.side.category(level);
    if (want.empty()) continue;
    sweep(level_stage(level), [&](const BehaviorEvent& e) { return e.side.category(level) == want; });
  }
  if (!cfg.union_action_types.empty() || !cfg.union_scenarios.empty()) {
    sweep(SearchStage::kUnion, [&](const BehaviorEvent& e) {
      return std::find(cfg.union_action_types.begin(), cfg.union_action_types.end(), e.action_type) !=
                 cfg.union_action_types.end() ||
             std::find(cfg.union_scenarios.begin(), cfg.union_scenarios.end(), e.action_scenario) !=
                 cfg.union_scenarios.end();
    });
  }
  if (cfg.fill_latest) sweep(SearchStage::kLatest, [](const BehaviorEvent&) { return true; });
  return out;
}

SoftSearchContext soft_search_context(const Model& model, const VocabMap& vocab) {
  const ModelConfig& c = model.config();
  if (c.kind == ModelKind::kSasrec || c.kind == ModelKind::kDsi) {
    throw ConfigError("soft search needs a tin, dare or stin model");
  }
  return {&model.bank(), &model.tin_params().front(), &vocab, c.fields, c.category_field,
          c.use_temporal};
}

std::vector<Selection> soft_search(const Trajectory& traj, const TargetAd& target,
                                   const SoftSearchContext& ctx, const SoftSearchConfig& cfg) {
  if (cfg.k < 1) throw ConfigError("soft search k must be >= 1");
  if (!ctx.bank || !ctx.params || !ctx.vocab) throw StateError("soft search context is incomplete");
  const auto& ev = traj.events;
  if (ev.empty()) return {};

  const EmbeddingSpace& space =
      cfg.use_attention_space ? ctx.bank->attention() : ctx.bank->representation();
  EncodedSample s = encode_sample(ev, target, *ctx.vocab, ctx.fields, ctx.category_field, 0.0);
  // encode_sample emits rows oldest first: row r holds event chrono[r].
  std::vector<std::size_t> chrono = recency_order(ev);
  std::reverse(chrono.begin(), chrono.end());

  Tape tape;
  const FieldMask all = space.all_fields();
  Var logits = attention_logits(space.target(tape, s, all, ctx.use_temporal),
                                space.behaviors(tape, s, all, ctx.use_temporal), *ctx.params);
  std::vector<double> score(ev.size());
  for (std::size_t r = 0; r < chrono.size(); ++r) score[chrono[r]] = logits.value().at(0, r);

  std::vector<std::size_t> idx(ev.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return newer(ev, a, b);
  });
  idx.resize(std::min(cfg.k, idx.size()));
  std::vector<Selection> out;
  for (std::size_t i : idx) out.push_back({i, SearchStage::kSoft, score[i]});
  return out;
}

std::string stratum_of(const BehaviorEvent& e, int level) {
  const std::string& c = e.side.category(level);
  return c.empty() ? std::string(kNoCategory) : c;
}

std::map<std::string, std::size_t> stratified_quotas(const std::map<std::string, std::size_t>& counts,
                                                     std::size_t k) {
  if (k < 1) throw ConfigError("stratified sample k must be >= 1");
  struct Cat {
    std::string id;
    std::size_t n;
    std::size_t q = 0;
  };
  std::vector<Cat> cats;
  std::size_t total = 0;
  for (const auto& [id, n] : counts) {
    if (n == 0) continue;
    cats.push_back({id, n});
    total += n;
  }
  // Larger categories first, ids ascending among equals: the tie order.
  std::stable_sort(cats.begin(), cats.end(), [](const Cat& a, const Cat& b) { return a.n > b.n; });

  std::map<std::string, std::size_t> out;
  if (k < cats.size()) {
    for (std::size_t j = 0; j < k; ++j) out[cats[j].id] = 1;
    return out;
  }
  std::size_t left = std::min(k, total) - cats.size();
  for (Cat& c : cats) c.q = 1;
  while (left > 0) {
    Cat* best = nullptr;
    double best_gap = 0.0;
    for (Cat& c : cats) {
      if (c.q >= c.n) continue;
      // ideal - q compared exactly as k*n_j - q*total over the common
      // denominator, so ties are not at the mercy of rounding.
      const double gap = static_cast<double>(k * c.n) - static_cast<double>(c.q * total);
      if (!best || gap > best_gap) {
        best = &c;
        best_gap = gap;
      }
    }
    ++best->q;
    --left;
  }
  for (const Cat& c : cats) out[c.id] = c.q;
  return out;
}

std::vector<Selection> stratified_sample(const Trajectory& traj, std::size_t k, int level) {
  if (level < 1 || level > 3) throw ConfigError("stratification level must be 1, 2 or 3");
  const auto& ev = traj.events;
  std::map<std::string, std::size_t> counts;
  for (const BehaviorEvent& e : ev) ++counts[stratum_of(e, level)];
  std::map<std::string, std::size_t> quota = stratified_quotas(counts, k);

  std::vector<Selection> out;
  for (std::size_t i : recency_order(ev)) {
    auto it = quota.find(stratum_of(ev[i], level));
    if (it == quota.end() || it->second == 0) continue;
    --it->second;
    out.push_back({i, SearchStage::kStratified, 0.0});
  }
  return out;
}

std::vector<BehaviorEvent> selected_events(const Trajectory& traj,
                                           const std::vector<Selection>& selection) {
  std::vector<BehaviorEvent> out;
  out.reserve(selection.size());
  for (const Selection& s : selection) out.push_back(traj.events.at(s.index));
  return out;
}

std::uint64_t selection_hash(const std::vector<Selection>& selection) {
  std::string buf;
  for (const Selection& s : selection) {
    buf += std::to_string(s.index);
    buf += ':';
    buf += to_string(s.stage);
    buf += ';';
  }
  return fnv1a64(buf);
}

}  // namespace longseq
