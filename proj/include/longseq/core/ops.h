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

#include <cstdint>
#include <string_view>
#include <vector>

#include "longseq/core/tape.h"

namespace longseq {

// Row-wise boolean mask for softmax_rows; 1 keeps the entry. Empty means no
// mask.
using Mask = std::vector<std::uint8_t>;

enum class Activation { kNone, kSigmoid, kSilu };

// All operators take and return rank-2 values. Shape violations throw
// DimensionError naming both shapes.

Var matmul(Var a, Var b);
// a * b^T, the attention-logit building block.
Var matmul_nt(Var a, Var b);
Var hadamard(Var a, Var b);
Var add(Var a, Var b);
// a (m x n) + row (1 x n) broadcast over rows.
Var add_row(Var a, Var row);
Var scale(Var a, double factor);
// Repeats a 1 x n row m times.
Var broadcast_rows(Var row, std::size_t m);
Var reshape(Var a, std::size_t rows, std::size_t cols);

// Numerically stabilised softmax over each row. Masked entries are exactly
// zero; a fully masked row throws.
Var softmax_rows(Var x, const Mask& mask = {});

// Row lookup. Backward scatter-adds, so duplicate ids accumulate. `what`
// names the vocabulary in index errors.
Var gather(Var table, const std::vector<std::int32_t>& ids, std::string_view what = "table");

Var concat_last_axis(const std::vector<Var>& parts);
// axis 0 sums over rows (-> 1 x n), axis 1 over columns (-> m x 1).
Var sum_axis(Var a, int axis);
Var sigmoid(Var a);
Var silu(Var a);
Var dense_layer(Var x, Var weight, Var bias, Activation act);

// Mean binary cross-entropy of probabilities `p` (m x 1) against `labels`.
// Probabilities are clamped to [kProbClamp, 1 - kProbClamp].
inline constexpr double kProbClamp = 1e-12;
Var bce_loss(Var p, const std::vector<double>& labels);

}  // namespace longseq
