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
#include <string>
#include <vector>

#include "longseq/core/parameter.h"
#include "longseq/core/random.h"
#include "longseq/core/tape.h"

namespace longseq {

enum class TemporalMode { kShared, kDecoupled };

inline constexpr std::int64_t kSecondsPerDay = 86400;

// B - 1 edges at 1, 2, ..., B - 1 days: buckets 0..B-2 are whole days and
// bucket B-1 collects everything older.
std::vector<std::int64_t> day_bucket_edges(std::size_t buckets);

struct TemporalConfig {
  std::size_t positions = 17;  // P; position indices >= P clamp to P - 1
  std::vector<std::int64_t> bucket_edges = day_bucket_edges(366);
  TemporalMode mode = TemporalMode::kShared;
  std::size_t categories = 1;  // rows of the target query tables when decoupled
};

// Relative-position and interval encodings for behaviors, plus the target-side
// query encodings. In shared mode the query tables have a single row used for
// every target category.
class TemporalEncoder {
 public:
  TemporalEncoder() = default;
  TemporalEncoder(ParamSet& params, const std::string& prefix, std::size_t dim,
                  TemporalConfig config, Rng& rng);

  const TemporalConfig& config() const { return config_; }
  std::size_t buckets() const { return config_.bucket_edges.size() + 1; }

  // Number of edges <= dt. Throws DataError for dt < 0.
  std::size_t bucket(std::int64_t dt) const;
  std::size_t position_index(std::int64_t position) const;
  std::size_t query_row(std::int32_t category) const;

  // n x d: PE_pos(i) + PE_interval(dt_i) for each behavior.
  Var behavior_encoding(Tape& tape, const std::vector<int>& positions,
                        const std::vector<std::int64_t>& intervals) const;
  // 1 x d: q_pos + q_interval of the target's category row.
  Var target_query(Tape& tape, std::int32_t category) const;

  Parameter* pos_table = nullptr;
  Parameter* interval_table = nullptr;
  Parameter* query_pos = nullptr;
  Parameter* query_interval = nullptr;

 private:
  TemporalConfig config_;
};

}  // namespace longseq
