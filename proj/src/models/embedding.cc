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

#include "longseq/models/embedding.h"

#include "longseq/core/error.h"
#include "longseq/core/ops.h"

namespace longseq {

EmbeddingSpace::EmbeddingSpace(ParamSet& params, const std::string& prefix,
                               std::vector<std::string> fields,
                               const std::vector<std::size_t>& vocab_sizes, std::size_t dim,
                               const TemporalConfig& temporal, Rng& rng)
    : fields_(std::move(fields)), dim_(dim) {
  if (fields_.size() != vocab_sizes.size()) {
    throw ConfigError("one vocabulary size per field is required");
  }
  if (dim == 0) throw ConfigError("embedding dim must be positive");
  for (std::size_t f = 0; f < fields_.size(); ++f) {
    tables_.push_back(
        &params.add(prefix + "emb." + fields_[f], init_embedding(rng, vocab_sizes[f], dim)));
    target_usable_.push_back(target_has_field(fields_[f]) ? 1 : 0);
  }
  temporal_ = TemporalEncoder(params, prefix + "pe.", dim, temporal, rng);
}

Var EmbeddingSpace::behaviors(Tape& tape, const EncodedSample& s, const FieldMask& mask,
                              bool with_temporal) const {
  if (s.behavior_ids.size() != fields_.size() || mask.size() != fields_.size()) {
    throw DimensionError("sample or mask does not match the embedding fields");
  }
  Var sum;
  for (std::size_t f = 0; f < fields_.size(); ++f) {
    if (!mask[f]) continue;
    Var e = gather(tape.param(*tables_[f]), s.behavior_ids[f], fields_[f]);
    sum = sum.valid() ? add(sum, e) : e;
  }
  if (with_temporal) {
    Var pe = temporal_.behavior_encoding(tape, s.positions, s.intervals);
    sum = sum.valid() ? add(sum, pe) : pe;
  }
  return sum.valid() ? sum : tape.constant(Tensor::zeros(s.size(), dim_));
}

Var EmbeddingSpace::target(Tape& tape, const EncodedSample& s, const FieldMask& mask,
                           bool with_temporal) const {
  if (s.target_ids.size() != fields_.size() || mask.size() != fields_.size()) {
    throw DimensionError("sample or mask does not match the embedding fields");
  }
  Var sum;
  for (std::size_t f = 0; f < fields_.size(); ++f) {
    if (!mask[f] || !target_usable_[f]) continue;
    Var e = gather(tape.param(*tables_[f]), {s.target_ids[f]}, fields_[f]);
    sum = sum.valid() ? add(sum, e) : e;
  }
  if (with_temporal) {
    Var q = temporal_.target_query(tape, s.category);
    sum = sum.valid() ? add(sum, q) : q;
  }
  return sum.valid() ? sum : tape.constant(Tensor::zeros(1, dim_));
}

DualEmbeddingBank::DualEmbeddingBank(ParamSet& params, const std::vector<std::string>& fields,
                                     const std::vector<std::size_t>& vocab_sizes,
                                     std::size_t dim, const TemporalConfig& temporal,
                                     bool share_spaces, Rng& rng) {
  if (share_spaces) {
    attention_ = std::make_shared<EmbeddingSpace>(params, "", fields, vocab_sizes, dim, temporal, rng);
    representation_ = attention_;
  } else {
    attention_ = std::make_shared<EmbeddingSpace>(params, "A.", fields, vocab_sizes, dim, temporal, rng);
    representation_ =
        std::make_shared<EmbeddingSpace>(params, "R.", fields, vocab_sizes, dim, temporal, rng);
  }
}

}  // namespace longseq
