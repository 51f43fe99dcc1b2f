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

// MLP with silu hidden layers and a single output logit.
struct PredictionHead {
  std::vector<Parameter*> weights;
  std::vector<Parameter*> biases;

  static PredictionHead create(ParamSet& params, const std::string& prefix, std::size_t input,
                               const std::vector<std::size_t>& hidden, Rng& rng);
  std::size_t input_width() const;
  Var logit(Var x) const;  // 1 x 1
  Var probability(Var x) const;
};

}  // namespace longseq
