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

#include "longseq/models/temporal.h"

#include <algorithm>

#include "longseq/core/error.h"
#include "longseq/core/ops.h"

namespace longseq {

std::vector<std::int64_t> day_bucket_edges(std::size_t buckets) {
  if (buckets < 1) throw ConfigError("interval buckets must be >= 1");
  std::vector<std::int64_t> edges;
  for (std::size_t b = 1; b < buckets; ++b) edges.push_back(static_cast<std::int64_t>(b) * kSecondsPerDay);
  return edges;
}

TemporalEncoder::TemporalEncoder(ParamSet& params, const std::string& prefix, std::size_t dim,
                                 TemporalConfig config, Rng& rng)
    : config_(std::move(config)) {
  if (config_.positions < 2) throw ConfigError("temporal positions must be >= 2");
  const auto& e = config_.bucket_edges;
  if (!e.empty() && e.front() <= 0) throw ConfigError("first bucket edge must be positive");
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (e[i] <= e[i - 1]) throw ConfigError("bucket edges must be strictly increasing");
  }
  if (config_.categories < 1) throw ConfigError("temporal categories must be >= 1");
  const std::size_t rows = config_.mode == TemporalMode::kShared ? 1 : config_.categories;
  pos_table = &params.add(prefix + "pos", init_embedding(rng, config_.positions, dim));
  interval_table = &params.add(prefix + "interval", init_embedding(rng, buckets(), dim));
  // Decoupled rows start as copies of one row, so both modes begin at the same
  // function and draw the same random stream.
  auto replicated = [&](const char* name) {
    const Tensor row = init_embedding(rng, 1, dim);
    Tensor t = Tensor::zeros(rows, dim);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < dim; ++c) t.at(r, c) = row.at(0, c);
    }
    return &params.add(prefix + name, std::move(t));
  };
  query_pos = replicated("query_pos");
  query_interval = replicated("query_interval");
}

std::size_t TemporalEncoder::bucket(std::int64_t dt) const {
  if (dt < 0) throw DataError("behavior after target");
  const auto& e = config_.bucket_edges;
  return static_cast<std::size_t>(std::upper_bound(e.begin(), e.end(), dt) - e.begin());
}

std::size_t TemporalEncoder::position_index(std::int64_t position) const {
  if (position < 0) throw DataError("negative behavior position");
  return std::min<std::size_t>(static_cast<std::size_t>(position), config_.positions - 1);
}

std::size_t TemporalEncoder::query_row(std::int32_t category) const {
  if (config_.mode == TemporalMode::kShared) return 0;
  if (category < 0 || static_cast<std::size_t>(category) >= config_.categories) return 0;
  return static_cast<std::size_t>(category);
}

Var TemporalEncoder::behavior_encoding(Tape& tape, const std::vector<int>& positions,
                                       const std::vector<std::int64_t>& intervals) const {
  if (positions.size() != intervals.size()) {
    throw DimensionError("positions and intervals differ in length");
  }
  std::vector<std::int32_t> pos_ids, bucket_ids;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    pos_ids.push_back(static_cast<std::int32_t>(position_index(positions[i])));
    bucket_ids.push_back(static_cast<std::int32_t>(bucket(intervals[i])));
  }
  return add(gather(tape.param(*pos_table), pos_ids, "position"),
             gather(tape.param(*interval_table), bucket_ids, "interval"));
}

Var TemporalEncoder::target_query(Tape& tape, std::int32_t category) const {
  const std::vector<std::int32_t> row{static_cast<std::int32_t>(query_row(category))};
  return add(gather(tape.param(*query_pos), row, "query_pos"),
             gather(tape.param(*query_interval), row, "query_interval"));
}

}  // namespace longseq
