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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "longseq/core/optim.h"
#include "longseq/harness/dataset.h"
#include "longseq/models/model.h"
#include "longseq/search/search.h"
#include "longseq/trajectory/vocab.h"

namespace longseq {

// Stage-one policy applied to every sample before the model sees it.
enum class SearchPolicy { kLatest, kHard, kSoft, kStratified };
std::string_view to_string(SearchPolicy p);
std::optional<SearchPolicy> parse_search_policy(std::string_view s);

struct SearchSettings {
  SearchPolicy policy = SearchPolicy::kLatest;
  std::size_t k = 16;
  SearchConfig hard;              // k is taken from `k`
  bool use_attention_space = true;  // soft
  int stratify_level = 1;           // stratified

  void validate() const;
};

struct RunConfig {
  ModelConfig model;
  SearchSettings search;
  AdamConfig optimizer{0.01};
  std::size_t epochs = 3;
  std::size_t batch_size = 64;
  double eval_fraction = 0.2;
  std::uint64_t seed = 1;

  void validate() const;
};

nlohmann::json run_config_to_json(const RunConfig& c);
// Missing keys keep their defaults; unknown keys are rejected by name.
RunConfig run_config_from_json(const nlohmann::json& j);

struct Split {
  std::vector<std::size_t> train;  // sample indices
  std::vector<std::size_t> eval;
};
// Every sample of a user lands on the same side.
Split split_by_user(const Dataset& data, double eval_fraction, std::uint64_t seed);

// Vocabulary over the model fields and the category field, built from the
// given samples' trajectories and targets only.
VocabMap build_run_vocab(const ModelConfig& model, const Dataset& data,
                         const std::vector<std::size_t>& samples);

std::vector<Selection> select_behaviors(const SearchSettings& search, const Trajectory& traj,
                                        const TargetAd& target, const Model& model,
                                        const VocabMap& vocab);
// Every policy but soft, which throws ConfigError here.
std::vector<Selection> select_behaviors(const SearchSettings& search, const Trajectory& traj,
                                        const TargetAd& target);

struct CategoryMetrics {
  std::size_t samples = 0;
  std::size_t positives = 0;
  std::optional<double> auc;  // absent unless both classes occur
};

struct EvalReport {
  std::size_t samples = 0;
  std::optional<double> auc;
  double logloss = 0.0;
  std::map<std::string, CategoryMetrics> per_category;  // by target category value
  std::vector<double> probabilities;                    // in sample order
  std::vector<std::uint64_t> selection_hashes;          // per sample
  std::uint64_t selection_digest = 0;                   // hash over all of them
};

EvalReport evaluate(const Model& model, const VocabMap& vocab, const Dataset& data,
                    const std::vector<std::size_t>& samples, const SearchSettings& search);

nlohmann::json eval_report_to_json(const EvalReport& r);

struct EpochMetrics {
  std::size_t epoch = 0;  // 0 = before any update
  double train_loss = 0.0;
  std::optional<double> eval_auc;
  double eval_logloss = 0.0;
};

struct TrainResult {
  std::unique_ptr<Model> model;
  VocabMap vocab;
  Split split;
  std::vector<EpochMetrics> history;
  bool diverged = false;
  std::string divergence;  // what went non-finite
  EvalReport final_eval;   // of the returned parameters
};

// Adam on mean per-batch BCE. A non-finite value anywhere in an epoch stops
// training and restores the parameters from the end of the previous epoch.
TrainResult train(const RunConfig& run, const Dataset& data);

nlohmann::json epoch_metrics_to_json(const EpochMetrics& m);

}  // namespace longseq
