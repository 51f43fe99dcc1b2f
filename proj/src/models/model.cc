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

#include "longseq/models/model.h"

#include <algorithm>
#include <set>

#include "longseq/core/error.h"
#include "longseq/core/ops.h"

namespace longseq {
namespace {

constexpr std::string_view kKindNames[] = {"tin", "dare", "dsi", "stin", "sasrec"};

bool has_field(const ModelConfig& c, const std::string& f) {
  return std::find(c.fields.begin(), c.fields.end(), f) != c.fields.end();
}

}  // namespace

std::string_view to_string(ModelKind kind) { return kKindNames[static_cast<int>(kind)]; }

std::optional<ModelKind> parse_model_kind(std::string_view s) {
  for (int i = 0; i < 5; ++i) {
    if (kKindNames[i] == s) return static_cast<ModelKind>(i);
  }
  return std::nullopt;
}

void ModelConfig::validate() const {
  if (dim == 0) throw ConfigError("dim must be positive");
  if (fields.empty()) throw ConfigError("fields must not be empty");
  std::set<std::string> seen;
  for (const std::string& f : fields) {
    if (!is_event_field(f)) throw ConfigError("unknown field '" + f + "'");
    if (!seen.insert(f).second) throw ConfigError("duplicate field '" + f + "'");
  }
  if (!is_event_field(category_field)) {
    throw ConfigError("unknown category_field '" + category_field + "'");
  }
  if (max_len == 0) throw ConfigError("max_len must be positive");
  if (interval_buckets == 0) throw ConfigError("interval_buckets must be positive");
  if (kind == ModelKind::kDsi) {
    if (groups.empty()) throw ConfigError("dsi needs at least one group");
    std::set<std::string> used;
    for (const auto& g : groups) {
      if (g.empty()) throw ConfigError("dsi groups must be non-empty");
      for (const std::string& f : g) {
        if (f != kTemporalField && !has_field(*this, f)) {
          throw ConfigError("dsi group field '" + f + "' is not a model field");
        }
        if (!used.insert(f).second) throw ConfigError("dsi groups overlap on '" + f + "'");
      }
    }
  }
  if (kind == ModelKind::kStin && layers == 0) throw ConfigError("stin layers must be >= 1");
  if (kind == ModelKind::kSasrec && blocks == 0) throw ConfigError("sasrec blocks must be >= 1");
}

nlohmann::json model_config_to_json(const ModelConfig& c) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(c.kind));
  j["dim"] = c.dim;
  j["fields"] = c.fields;
  j["category_field"] = c.category_field;
  j["use_temporal"] = c.use_temporal;
  j["temporal_mode"] = c.temporal_mode == TemporalMode::kShared ? "shared" : "decoupled";
  j["max_len"] = c.max_len;
  j["interval_buckets"] = c.interval_buckets;
  j["hidden"] = c.hidden;
  j["share_spaces"] = c.share_spaces;
  j["groups"] = c.groups;
  j["fusion"] = c.fusion == Fusion::kSum ? "sum" : "concat";
  j["layers"] = c.layers;
  j["blocks"] = c.blocks;
  j["decoupled_heads"] = c.decoupled_heads;
  return j;
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("model config must be an object");
  ModelConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "kind") {
        auto k = parse_model_kind(v.get<std::string>());
        if (!k) throw ConfigError("unknown model kind '" + v.get<std::string>() + "'");
        c.kind = *k;
      } else if (key == "dim") {
        c.dim = v.get<std::size_t>();
      } else if (key == "fields") {
        c.fields = v.get<std::vector<std::string>>();
      } else if (key == "category_field") {
        c.category_field = v.get<std::string>();
      } else if (key == "use_temporal") {
        c.use_temporal = v.get<bool>();
      } else if (key == "temporal_mode") {
        const std::string m = v.get<std::string>();
        if (m != "shared" && m != "decoupled") throw ConfigError("unknown temporal_mode '" + m + "'");
        c.temporal_mode = m == "shared" ? TemporalMode::kShared : TemporalMode::kDecoupled;
      } else if (key == "max_len") {
        c.max_len = v.get<std::size_t>();
      } else if (key == "interval_buckets") {
        c.interval_buckets = v.get<std::size_t>();
      } else if (key == "hidden") {
        c.hidden = v.get<std::vector<std::size_t>>();
      } else if (key == "share_spaces") {
        c.share_spaces = v.get<bool>();
      } else if (key == "groups") {
        c.groups = v.get<std::vector<std::vector<std::string>>>();
      } else if (key == "fusion") {
        const std::string f = v.get<std::string>();
        if (f != "sum" && f != "concat") throw ConfigError("unknown fusion '" + f + "'");
        c.fusion = f == "sum" ? Fusion::kSum : Fusion::kConcat;
      } else if (key == "layers") {
        c.layers = v.get<std::size_t>();
      } else if (key == "blocks") {
        c.blocks = v.get<std::size_t>();
      } else if (key == "decoupled_heads") {
        c.decoupled_heads = v.get<bool>();
      } else {
        throw ConfigError("unknown model config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad model config: ") + e.what());
  }
  c.validate();
  return c;
}

Model::Model(ModelConfig config, std::vector<std::size_t> vocab_sizes, std::size_t categories,
             std::uint64_t seed)
    : config_(std::move(config)),
      vocab_sizes_(std::move(vocab_sizes)),
      categories_(std::max<std::size_t>(categories, 1)),
      seed_(seed) {
  config_.validate();
  Rng rng(derive_seed(seed, "model-init"));
  const std::size_t d = config_.dim;

  TemporalConfig tc;
  tc.positions = config_.max_len + 1;
  tc.bucket_edges = day_bucket_edges(config_.interval_buckets);
  tc.mode = config_.temporal_mode;
  tc.categories = categories_;
  const bool dual = config_.kind == ModelKind::kDare && !config_.share_spaces;
  bank_ = std::make_unique<DualEmbeddingBank>(params_, config_.fields, vocab_sizes_, d, tc, !dual, rng);

  std::size_t u_width = d;
  switch (config_.kind) {
    case ModelKind::kTin:
      tins_.push_back(TinParams::create(params_, "tin.", d, rng));
      break;
    case ModelKind::kDare:
      if (config_.share_spaces) {
        tins_.push_back(TinParams::create(params_, "tin.", d, rng));
      } else {
        tins_.push_back(TinParams::create(params_, "att.", d, rng));
        tins_.push_back(TinParams::create(params_, "rep.", d, rng));
      }
      break;
    case ModelKind::kDsi:
      for (std::size_t g = 0; g < config_.groups.size(); ++g) {
        tins_.push_back(TinParams::create(params_, "group" + std::to_string(g) + ".", d, rng));
        FieldMask mask(config_.fields.size(), 0);
        bool temporal = false;
        for (const std::string& f : config_.groups[g]) {
          if (f == kTemporalField) {
            temporal = true;
            continue;
          }
          mask[std::find(config_.fields.begin(), config_.fields.end(), f) - config_.fields.begin()] = 1;
        }
        group_masks_.push_back(mask);
        group_temporal_.push_back(temporal && config_.use_temporal);
      }
      if (config_.fusion == Fusion::kConcat) u_width = d * config_.groups.size();
      break;
    case ModelKind::kStin:
      for (std::size_t l = 0; l < config_.layers; ++l) {
        tins_.push_back(TinParams::create(params_, "layer" + std::to_string(l) + ".", d, rng));
      }
      break;
    case ModelKind::kSasrec:
      sasrec_ = SasrecParams::create(params_, "sasrec.", d, config_.blocks,
                                     config_.decoupled_heads ? categories_ : 1, d, rng);
      sasrec_bias_ = &params_.add("sasrec.bias", Tensor::zeros(1, 1));
      return;
  }
  head_ = PredictionHead::create(params_, "head.", u_width + d, config_.hidden, rng);
}

Var Model::ranking_logit(Tape& tape, const EncodedSample& s, ForwardResult& r) const {
  const EmbeddingSpace& rep = bank_->representation();
  const FieldMask all = rep.all_fields();
  const bool temporal = config_.use_temporal;
  Var e = rep.behaviors(tape, s, all, temporal);
  Var v = rep.target(tape, s, all, temporal);
  AttentionOutput out;
  switch (config_.kind) {
    case ModelKind::kTin:
      out = tin_forward(v, e, tins_[0]);
      break;
    case ModelKind::kDare: {
      if (bank_->shared()) {
        out = dare_forward(v, e, v, e, tins_[0], tins_[0]);
      } else {
        const EmbeddingSpace& att = bank_->attention();
        out = dare_forward(att.target(tape, s, all, temporal), att.behaviors(tape, s, all, temporal),
                           v, e, tins_[0], tins_[1]);
      }
      break;
    }
    case ModelKind::kDsi: {
      std::vector<Var> targets, behaviors;
      for (std::size_t g = 0; g < group_masks_.size(); ++g) {
        targets.push_back(rep.target(tape, s, group_masks_[g], group_temporal_[g]));
        behaviors.push_back(rep.behaviors(tape, s, group_masks_[g], group_temporal_[g]));
      }
      out = dsi_tin_forward(targets, behaviors, v, e, tins_, config_.fusion);
      break;
    }
    case ModelKind::kStin:
      out = stin_forward(v, e, tins_);
      break;
    case ModelKind::kSasrec:
      throw StateError("ranking_logit called for a matching model");
  }
  r.alphas = out.alphas;
  Var semantic = rep.target(tape, s, all, false);
  return head_.logit(concat_last_axis({out.u, semantic}));
}

ForwardResult Model::forward(Tape& tape, const EncodedSample& s) const {
  ForwardResult r;
  if (config_.kind == ModelKind::kSasrec) {
    const EmbeddingSpace& space = bank_->representation();
    const FieldMask all = space.all_fields();
    Var seq = space.behaviors(tape, s, all, config_.use_temporal);
    SasrecOutput out = sasrec_forward(seq, sasrec_);
    r.alphas = out.alphas;
    r.user_vectors = out.user_vectors;
    Var v = space.target(tape, s, all, false);
    r.logit = add(matching_score(out.user_vectors, sasrec_.head_for(s.category), v),
                  tape.param(*sasrec_bias_));
  } else {
    r.logit = ranking_logit(tape, s, r);
  }
  r.probability = sigmoid(r.logit);
  return r;
}

double Model::predict(const EncodedSample& s) const {
  Tape tape;
  return forward(tape, s).probability.value()[0];
}

std::vector<std::size_t> vocab_sizes_for(const ModelConfig& c, const VocabMap& vocab) {
  std::vector<std::size_t> sizes;
  for (const std::string& f : c.fields) sizes.push_back(vocab.size(f));
  return sizes;
}

std::unique_ptr<Model> make_model(const ModelConfig& c, const VocabMap& vocab, std::uint64_t seed) {
  return std::make_unique<Model>(c, vocab_sizes_for(c, vocab), vocab.size(c.category_field), seed);
}

}  // namespace longseq
