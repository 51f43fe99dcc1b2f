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

#include "longseq/models/head.h"

#include "longseq/core/error.h"
#include "longseq/core/ops.h"

namespace longseq {

PredictionHead PredictionHead::create(ParamSet& params, const std::string& prefix,
                                      std::size_t input, const std::vector<std::size_t>& hidden,
                                      Rng& rng) {
  PredictionHead h;
  std::size_t width = input;
  std::vector<std::size_t> sizes = hidden;
  sizes.push_back(1);
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    if (sizes[l] == 0) throw ConfigError("prediction head layer width must be positive");
    const std::string pre = prefix + "layer" + std::to_string(l) + ".";
    h.weights.push_back(&params.add(pre + "w", init_matrix(rng, width, sizes[l])));
    h.biases.push_back(&params.add(pre + "b", Tensor::zeros(1, sizes[l])));
    width = sizes[l];
  }
  return h;
}

std::size_t PredictionHead::input_width() const { return weights.front()->value.rows(); }

Var PredictionHead::logit(Var x) const {
  if (x.cols() != input_width()) {
    throw DimensionError("prediction head expects width " + std::to_string(input_width()) +
                         ", got " + std::to_string(x.cols()));
  }
  Tape& t = *x.tape();
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const Activation act = l + 1 < weights.size() ? Activation::kSilu : Activation::kNone;
    x = dense_layer(x, t.param(*weights[l]), t.param(*biases[l]), act);
  }
  return x;
}

Var PredictionHead::probability(Var x) const { return sigmoid(logit(x)); }

}  // namespace longseq
