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

#include <memory>
#include <string>
#include <vector>

#include "longseq/core/parameter.h"
#include "longseq/core/tape.h"
#include "longseq/models/sample.h"
#include "longseq/models/temporal.h"

namespace longseq {

// Selects fields by index into the model's field list.
using FieldMask = std::vector<std::uint8_t>;

// One embedding space: a table per field plus the temporal encoder.
class EmbeddingSpace {
 public:
  EmbeddingSpace(ParamSet& params, const std::string& prefix, std::vector<std::string> fields,
                 const std::vector<std::size_t>& vocab_sizes, std::size_t dim,
                 const TemporalConfig& temporal, Rng& rng);

  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& fields() const { return fields_; }
  const TemporalEncoder& temporal() const { return temporal_; }
  Parameter& table(std::size_t field) const { return *tables_[field]; }
  FieldMask all_fields() const { return FieldMask(fields_.size(), 1); }

  // n x d sum of the masked fields' embeddings, plus PE_pos + PE_interval
  // when `with_temporal`. An empty selection gives zeros.
  Var behaviors(Tape& tape, const EncodedSample& s, const FieldMask& mask,
                bool with_temporal) const;
  // 1 x d sum of the masked target fields (fields a target lacks are
  // skipped), plus the category's query encodings when `with_temporal`.
  Var target(Tape& tape, const EncodedSample& s, const FieldMask& mask,
             bool with_temporal) const;

 private:
  std::vector<std::string> fields_;
  std::vector<Parameter*> tables_;
  std::vector<std::uint8_t> target_usable_;
  std::size_t dim_;
  TemporalEncoder temporal_;
};

// Attention space and representation space. With share_spaces both refer to
// one space.
class DualEmbeddingBank {
 public:
  DualEmbeddingBank(ParamSet& params, const std::vector<std::string>& fields,
                    const std::vector<std::size_t>& vocab_sizes, std::size_t dim,
                    const TemporalConfig& temporal, bool share_spaces, Rng& rng);

  const EmbeddingSpace& attention() const { return *attention_; }
  const EmbeddingSpace& representation() const { return *representation_; }
  bool shared() const { return attention_ == representation_; }

 private:
  std::shared_ptr<EmbeddingSpace> attention_;
  std::shared_ptr<EmbeddingSpace> representation_;
};

}  // namespace longseq
