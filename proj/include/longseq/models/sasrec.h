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

#include <string>
#include <vector>

#include "longseq/core/parameter.h"
#include "longseq/core/random.h"
#include "longseq/core/tape.h"

namespace longseq {

// Single-head causal self-attention followed by a silu feed-forward layer,
// both with residual connections.
struct SasrecBlock {
  Parameter* w_q = nullptr;
  Parameter* w_k = nullptr;
  Parameter* w_v = nullptr;
  Parameter* ffn_w1 = nullptr;
  Parameter* ffn_b1 = nullptr;
  Parameter* ffn_w2 = nullptr;
  Parameter* ffn_b2 = nullptr;
};

struct SasrecParams {
  std::vector<SasrecBlock> blocks;
  Parameter* heads = nullptr;  // d x (num_heads * d_out); head c is column block c
  std::size_t num_heads = 1;
  std::size_t d_out = 0;
  std::size_t default_category = 0;
  bool causal = true;

  static SasrecParams create(ParamSet& params, const std::string& prefix, std::size_t dim,
                             std::size_t blocks, std::size_t num_heads, std::size_t d_out,
                             Rng& rng);
  // Head index for a category id; unknown or out-of-range ids (and every id
  // when there is one head) map to default_category.
  std::size_t head_for(std::int32_t category) const;
};

struct SasrecOutput {
  Var user_vectors;         // num_heads x d_out
  std::vector<Var> alphas;  // n x n attention matrix per block
};

// `sequence` is n x d, oldest first; the last row's final state feeds the heads.
SasrecOutput sasrec_forward(Var sequence, const SasrecParams& p);

// <user_vectors[head], v_t> as 1 x 1.
Var matching_score(Var user_vectors, std::size_t head, Var target);

}  // namespace longseq
