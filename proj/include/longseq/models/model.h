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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "longseq/core/parameter.h"
#include "longseq/models/attention.h"
#include "longseq/models/embedding.h"
#include "longseq/models/head.h"
#include "longseq/models/sample.h"
#include "longseq/models/sasrec.h"

namespace longseq {

enum class ModelKind { kTin, kDare, kDsi, kStin, kSasrec };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view s);

// Name of the pseudo-field that puts temporal encodings into a DSI group.
inline constexpr std::string_view kTemporalField = "temporal";

struct ModelConfig {
  ModelKind kind = ModelKind::kTin;
  std::size_t dim = 8;
  std::vector<std::string> fields = {"item_id", "cat_l1", "action_type", "action_scenario"};
  std::string category_field = "cat_l1";
  bool use_temporal = true;
  TemporalMode temporal_mode = TemporalMode::kShared;
  std::size_t max_len = 16;  // P = max_len + 1
  std::size_t interval_buckets = 366;
  std::vector<std::size_t> hidden = {16};
  // DARE
  bool share_spaces = false;
  // DSI
  std::vector<std::vector<std::string>> groups;
  Fusion fusion = Fusion::kConcat;
  // STIN
  std::size_t layers = 1;
  // SASRec
  std::size_t blocks = 2;
  bool decoupled_heads = true;

  // Throws ConfigError naming the offending setting.
  void validate() const;
};

nlohmann::json model_config_to_json(const ModelConfig& c);
// Unknown keys are rejected.
ModelConfig model_config_from_json(const nlohmann::json& j);

struct ForwardResult {
  Var logit;                // 1 x 1
  Var probability;          // 1 x 1
  std::vector<Var> alphas;  // every attention row block computed
  Var user_vectors;         // SASRec only
};

class Model {
 public:
  // `vocab_sizes` follows config.fields; `categories` is the size of the
  // category field's vocabulary (id 0 included).
  Model(ModelConfig config, std::vector<std::size_t> vocab_sizes, std::size_t categories,
        std::uint64_t seed);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  ForwardResult forward(Tape& tape, const EncodedSample& s) const;
  double predict(const EncodedSample& s) const;

  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }
  const ModelConfig& config() const { return config_; }
  const std::vector<std::size_t>& vocab_sizes() const { return vocab_sizes_; }
  std::size_t categories() const { return categories_; }
  std::uint64_t seed() const { return seed_; }
  const DualEmbeddingBank& bank() const { return *bank_; }
  const std::vector<TinParams>& tin_params() const { return tins_; }
  const SasrecParams& sasrec_params() const { return sasrec_; }

 private:
  Var ranking_logit(Tape& tape, const EncodedSample& s, ForwardResult& r) const;

  ModelConfig config_;
  std::vector<std::size_t> vocab_sizes_;
  std::size_t categories_;
  std::uint64_t seed_;
  ParamSet params_;
  std::unique_ptr<DualEmbeddingBank> bank_;
  std::vector<TinParams> tins_;  // TIN: 1, DARE: attention + representation, DSI: per group, STIN: per layer
  std::vector<FieldMask> group_masks_;
  std::vector<bool> group_temporal_;
  SasrecParams sasrec_;
  Parameter* sasrec_bias_ = nullptr;
  PredictionHead head_;
};

std::vector<std::size_t> vocab_sizes_for(const ModelConfig& c, const VocabMap& vocab);
std::unique_ptr<Model> make_model(const ModelConfig& c, const VocabMap& vocab, std::uint64_t seed);

}  // namespace longseq
