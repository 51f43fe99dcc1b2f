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

#include "longseq/models/sasrec.h"

#include <cmath>

#include "longseq/core/error.h"
#include "longseq/core/ops.h"

namespace longseq {

SasrecParams SasrecParams::create(ParamSet& params, const std::string& prefix, std::size_t dim,
                                  std::size_t blocks, std::size_t num_heads, std::size_t d_out,
                                  Rng& rng) {
  if (num_heads < 1) throw ConfigError("SASRec needs at least one head");
  SasrecParams p;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::string pre = prefix + "block" + std::to_string(b) + ".";
    SasrecBlock blk;
    blk.w_q = &params.add(pre + "w_q", init_matrix(rng, dim, dim));
    blk.w_k = &params.add(pre + "w_k", init_matrix(rng, dim, dim));
    blk.w_v = &params.add(pre + "w_v", init_matrix(rng, dim, dim));
    blk.ffn_w1 = &params.add(pre + "ffn_w1", init_matrix(rng, dim, dim));
    blk.ffn_b1 = &params.add(pre + "ffn_b1", Tensor::zeros(1, dim));
    blk.ffn_w2 = &params.add(pre + "ffn_w2", init_matrix(rng, dim, dim));
    blk.ffn_b2 = &params.add(pre + "ffn_b2", Tensor::zeros(1, dim));
    p.blocks.push_back(blk);
  }
  p.heads = &params.add(prefix + "heads", init_matrix(rng, dim, num_heads * d_out));
  p.num_heads = num_heads;
  p.d_out = d_out;
  return p;
}

std::size_t SasrecParams::head_for(std::int32_t category) const {
  if (num_heads == 1 || category <= 0 || static_cast<std::size_t>(category) >= num_heads) {
    return default_category;
  }
  return static_cast<std::size_t>(category);
}

SasrecOutput sasrec_forward(Var sequence, const SasrecParams& p) {
  const std::size_t n = sequence.rows();
  if (n == 0) throw DimensionError("SASRec over an empty sequence");
  Tape& t = *sequence.tape();
  Mask mask;
  if (p.causal) {
    mask.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) mask[i * n + j] = 1;
    }
  }
  SasrecOutput out;
  Var x = sequence;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(sequence.cols()));
  for (const SasrecBlock& b : p.blocks) {
    Var q = matmul(x, t.param(*b.w_q));
    Var k = matmul(x, t.param(*b.w_k));
    Var v = matmul(x, t.param(*b.w_v));
    Var alpha = softmax_rows(scale(matmul_nt(q, k), inv_sqrt_d), mask);
    out.alphas.push_back(alpha);
    x = add(x, matmul(alpha, v));
    Var h = dense_layer(x, t.param(*b.ffn_w1), t.param(*b.ffn_b1), Activation::kSilu);
    x = add(x, dense_layer(h, t.param(*b.ffn_w2), t.param(*b.ffn_b2), Activation::kNone));
  }
  Var last = gather(x, {static_cast<std::int32_t>(n - 1)}, "sequence");
  out.user_vectors = reshape(matmul(last, t.param(*p.heads)), p.num_heads, p.d_out);
  return out;
}

Var matching_score(Var user_vectors, std::size_t head, Var target) {
  if (head >= user_vectors.rows()) {
    throw IndexError("head " + std::to_string(head) + " out of range for " +
                     std::to_string(user_vectors.rows()) + " user vectors");
  }
  Var row = gather(user_vectors, {static_cast<std::int32_t>(head)}, "user_vectors");
  return matmul_nt(row, target);
}

}  // namespace longseq
