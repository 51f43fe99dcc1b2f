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

#include <cstddef>
#include <vector>

namespace longseq {

// Probability that a random positive outscores a random negative, ties
// counting one half, from average ranks. Throws StateError unless both
// classes are present.
double auc(const std::vector<double>& labels, const std::vector<double>& scores);

// Mean binary cross-entropy with probabilities clamped to
// [kProbClamp, 1 - kProbClamp].
double logloss(const std::vector<double>& labels, const std::vector<double>& probs);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // n - 1 denominator; 0 for a single value
  std::size_t n = 0;
};
Summary summarize(const std::vector<double>& values);

// 100 * (variant - base) / base.
double relative_delta(double variant, double base);

}  // namespace longseq
