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

#include "longseq/models/attention.h"

#include <cmath>

#include "longseq/core/error.h"
#include "longseq/core/ops.h"

namespace longseq {

TinParams TinParams::create(ParamSet& params, const std::string& prefix, std::size_t dim,
                            Rng& rng) {
  TinParams p;
  p.w_q = &params.add(prefix + "w_q", init_matrix(rng, dim, dim));
  p.w_k = &params.add(prefix + "w_k", init_matrix(rng, dim, dim));
  p.w_u = &params.add(prefix + "w_u", init_matrix(rng, dim, dim));
  p.w_v = &params.add(prefix + "w_v", init_matrix(rng, dim, dim));
  return p;
}

namespace {

void require_behaviors(Var behaviors) {
  if (behaviors.rows() == 0) throw DimensionError("attention over an empty behavior set");
}

Var represent(Var target, Var behaviors, Var w_u, Var w_v, Var alpha) {
  Var tr = hadamard(broadcast_rows(matmul(target, w_u), behaviors.rows()), matmul(behaviors, w_v));
  return matmul(alpha, tr);
}

}  // namespace

Var attention_logits(Var query, Var keys, const TinParams& p) {
  require_behaviors(keys);
  Tape& t = *query.tape();
  Var q = matmul(query, t.param(*p.w_q));
  Var k = matmul(keys, t.param(*p.w_k));
  return scale(matmul_nt(q, k), 1.0 / std::sqrt(static_cast<double>(q.cols())));
}

Var attention_weights(Var query, Var keys, const TinParams& p) {
  return softmax_rows(attention_logits(query, keys, p));
}

AttentionOutput tin_forward(Var target, Var behaviors, const TinParams& p) {
  return dare_forward(target, behaviors, target, behaviors, p, p);
}

AttentionOutput dare_forward(Var target_att, Var behaviors_att, Var target_rep,
                             Var behaviors_rep, const TinParams& p_att, const TinParams& p_rep) {
  require_behaviors(behaviors_rep);
  if (behaviors_att.rows() != behaviors_rep.rows()) {
    throw DimensionError("attention and representation behavior counts differ");
  }
  Tape& t = *target_rep.tape();
  Var alpha = attention_weights(target_att, behaviors_att, p_att);
  Var u = represent(target_rep, behaviors_rep, t.param(*p_rep.w_u), t.param(*p_rep.w_v), alpha);
  return {u, {alpha}};
}

AttentionOutput dsi_tin_forward(const std::vector<Var>& targets_att,
                                const std::vector<Var>& behaviors_att, Var target_rep,
                                Var behaviors_rep, const std::vector<TinParams>& groups,
                                Fusion fusion) {
  if (groups.empty()) throw ConfigError("DSI needs at least one feature group");
  if (targets_att.size() != groups.size() || behaviors_att.size() != groups.size()) {
    throw DimensionError("one attention input per DSI group is required");
  }
  AttentionOutput out;
  std::vector<Var> parts;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    AttentionOutput o = dare_forward(targets_att[g], behaviors_att[g], target_rep, behaviors_rep,
                                     groups[g], groups[g]);
    parts.push_back(o.u);
    out.alphas.push_back(o.alphas[0]);
  }
  if (parts.size() == 1) {
    out.u = parts[0];
  } else if (fusion == Fusion::kConcat) {
    out.u = concat_last_axis(parts);
  } else {
    out.u = parts[0];
    for (std::size_t g = 1; g < parts.size(); ++g) out.u = add(out.u, parts[g]);
  }
  return out;
}

AttentionOutput stin_forward(Var target, Var behaviors, const std::vector<TinParams>& layers) {
  if (layers.empty()) throw ConfigError("STIN needs at least one layer");
  require_behaviors(behaviors);
  Tape& t = *target.tape();
  AttentionOutput out;
  Var z = target;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const TinParams& p = layers[l];
    Var alpha = attention_weights(z, behaviors, p);
    Var w_u = t.param(*p.w_u);
    Var u_big = matmul(z, w_u);
    Var tr = hadamard(broadcast_rows(u_big, behaviors.rows()), matmul(behaviors, t.param(*p.w_v)));
    Var u = matmul(alpha, tr);
    out.alphas.push_back(alpha);
    out.u = u;
    if (l + 1 < layers.size()) z = add(u_big, u);
  }
  return out;
}

}  // namespace longseq
