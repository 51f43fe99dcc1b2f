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

#include "longseq/trajectory/event.h"
#include "longseq/trajectory/vocab.h"

namespace longseq {

// One model input after search: the selected behaviors (in the order the
// model should read them, oldest first) and the target, as vocabulary ids.
struct EncodedSample {
  std::vector<std::vector<std::int32_t>> behavior_ids;  // [field][behavior]
  std::vector<int> positions;                           // 1 = most recent
  std::vector<std::int64_t> intervals;                  // t_target - t_i, seconds
  std::vector<std::int32_t> target_ids;                 // [field]
  std::int32_t category = 0;                            // target category id, 0 = unknown
  double label = 0.0;

  std::size_t size() const { return positions.size(); }
};

// Whether a target carries a value for `field`: item-side fields and the
// request scenario do, behavior-only fields do not.
bool target_has_field(const std::string& field);

// Indices of `events` newest first; equal timestamps keep list order.
std::vector<std::size_t> recency_order(const std::vector<BehaviorEvent>& events);

// Encodes `selected` (any order) against `target`. Behaviors are emitted
// oldest first (the reverse of recency_order) and positions rank recency
// among the selected events. Throws DataError when a behavior
// is later than the target. An empty selection yields one all-padding
// behavior at position 1 with the largest representable interval.
EncodedSample encode_sample(const std::vector<BehaviorEvent>& selected, const TargetAd& target,
                            const VocabMap& vocab, const std::vector<std::string>& fields,
                            const std::string& category_field, double label);

}  // namespace longseq
