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

// W_Q, W_K, W_U, W_V, each d x d.
struct TinParams {
  Parameter* w_q = nullptr;
  Parameter* w_k = nullptr;
  Parameter* w_u = nullptr;
  Parameter* w_v = nullptr;

  static TinParams create(ParamSet& params, const std::string& prefix, std::size_t dim, Rng& rng);
};

struct AttentionOutput {
  Var u;                    // 1 x d (1 x G*d for concat fusion)
  std::vector<Var> alphas;  // one 1 x n row per attention (group, layer)
};

// softmax_i((q W_Q) . (k_i W_K) / sqrt(d)) as a 1 x n row.
Var attention_weights(Var query, Var keys, const TinParams& p);
// Pre-softmax logits of attention_weights.
Var attention_logits(Var query, Var keys, const TinParams& p);

// u = sum_i alpha_i * (v W_U (.) e_i W_V). `target` is 1 x d, `behaviors`
// n x d with n >= 1.
AttentionOutput tin_forward(Var target, Var behaviors, const TinParams& p);

// Attention from the attention-space encodings with p_att's W_Q, W_K;
// representation from the representation-space encodings with p_rep's W_U, W_V.
AttentionOutput dare_forward(Var target_att, Var behaviors_att, Var target_rep,
                             Var behaviors_rep, const TinParams& p_att, const TinParams& p_rep);

enum class Fusion { kSum, kConcat };

// One TIN per group: group g attends with (targets_att[g], behaviors_att[g])
// and represents with the shared all-field encodings.
AttentionOutput dsi_tin_forward(const std::vector<Var>& targets_att,
                                const std::vector<Var>& behaviors_att, Var target_rep,
                                Var behaviors_rep, const std::vector<TinParams>& groups,
                                Fusion fusion);

// Stacked TIN. z_1 = target; layer l uses Q = z_l W_Q^l, U = z_l W_U^l,
// K = e W_K^l, V = e W_V^l and z_{l+1} = U + u_l. Returns u_L.
AttentionOutput stin_forward(Var target, Var behaviors, const std::vector<TinParams>& layers);

}  // namespace longseq
