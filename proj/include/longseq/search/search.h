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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "longseq/models/attention.h"
#include "longseq/models/embedding.h"
#include "longseq/models/model.h"
#include "longseq/trajectory/event.h"
#include "longseq/trajectory/vocab.h"

namespace longseq {

enum class SearchStage { kCategoryL3, kCategoryL2, kCategoryL1, kUnion, kLatest, kSoft, kStratified };
std::string_view to_string(SearchStage stage);

// One retained behavior: its index in the input trajectory, how it was
// found, and the attention logit for soft search (0 otherwise).
struct Selection {
  std::size_t index = 0;
  SearchStage stage = SearchStage::kLatest;
  double score = 0.0;

  friend bool operator==(const Selection&, const Selection&) = default;
};

struct SearchConfig {
  std::size_t k = 16;
  std::vector<int> level_order = {3, 2, 1};
  std::vector<ActionType> union_action_types;
  std::vector<ActionScenario> union_scenarios;
  bool fill_latest = true;

  void validate() const;
};

// Category levels in level_order (newest first within a level), then the
// action-type/scenario union, then the latest remaining behaviors. Each
// event appears once, under the first stage that found it. Output is in
// stage order, newest first within a stage, and holds at most k events.
std::vector<Selection> hard_search(const Trajectory& traj, const TargetAd& target,
                                   const SearchConfig& cfg);

struct SoftSearchConfig {
  std::size_t k = 16;
  bool use_attention_space = true;
};

// What soft search needs to encode a trajectory: the model's fields, its
// category field, and the frozen vocabulary.
struct SoftSearchContext {
  const DualEmbeddingBank* bank = nullptr;
  const TinParams* params = nullptr;  // W_Q, W_K used for scoring
  const VocabMap* vocab = nullptr;
  std::vector<std::string> fields;
  std::string category_field = "cat_l1";
  bool use_temporal = true;
};

// Context scoring with a model's attention space and its first TinParams.
SoftSearchContext soft_search_context(const Model& model, const VocabMap& vocab);

// Top-k behaviors by pre-softmax attention logit; ties go to the newer
// event, then to the earlier index. Output is in rank order.
std::vector<Selection> soft_search(const Trajectory& traj, const TargetAd& target,
                                   const SoftSearchContext& ctx, const SoftSearchConfig& cfg);

inline constexpr std::string_view kNoCategory = "__none__";

// Category key of an event at `level`; "__none__" when the event has none.
std::string stratum_of(const BehaviorEvent& e, int level);

// Per-category slot counts. With m categories present and k >= m, every
// category starts with one slot and the rest go, one at a time, to the
// category furthest below its proportional share k * n_j / n (ties: larger
// n_j, then smaller id) among those with events left. With k < m the k
// largest categories get one slot each.
std::map<std::string, std::size_t> stratified_quotas(const std::map<std::string, std::size_t>& counts,
                                                     std::size_t k);

// The newest quota_j events of every category, output newest first.
std::vector<Selection> stratified_sample(const Trajectory& traj, std::size_t k, int level);

std::vector<BehaviorEvent> selected_events(const Trajectory& traj,
                                           const std::vector<Selection>& selection);

// FNV-1a over the selected indices and stages; identical selections give
// identical hashes.
std::uint64_t selection_hash(const std::vector<Selection>& selection);

}  // namespace longseq
