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

#include "longseq/core/optim.h"

#include <cmath>

#include "longseq/core/error.h"

namespace longseq {
namespace {

void check_grads(std::span<Parameter* const> params) {
  for (const Parameter* p : params) {
    if (!p->grad.same_shape(p->value)) {
      throw DimensionError("gradient of '" + p->name + "' has shape " +
                           shape_string(p->grad.shape()) + ", value " +
                           shape_string(p->value.shape()));
    }
    if (!p->grad.all_finite()) {
      throw NumericError("non-finite gradient for parameter '" + p->name + "'");
    }
  }
}

}  // namespace

void sgd_step(std::span<Parameter* const> params, double lr) {
  check_grads(params);
  for (Parameter* p : params) {
    for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] -= lr * p->grad[i];
  }
}

void Adam::step(std::span<Parameter* const> params) {
  check_grads(params);
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (Parameter* p : params) {
    if (!p->adam_m.same_shape(p->value)) p->adam_m = Tensor(p->value.shape(), 0.0);
    if (!p->adam_v.same_shape(p->value)) p->adam_v = Tensor(p->value.shape(), 0.0);
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double g = p->grad[i];
      double& m = p->adam_m[i];
      double& v = p->adam_v[i];
      m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
      v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g * g;
      const double mhat = m / bc1;
      const double vhat = v / bc2;
      p->value[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace longseq
