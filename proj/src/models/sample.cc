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

#include "longseq/models/sample.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include "longseq/core/error.h"

namespace longseq {

bool target_has_field(const std::string& field) {
  return field != "action_type" && field != "action_domain" && field != "action_detail";
}

std::vector<std::size_t> recency_order(const std::vector<BehaviorEvent>& events) {
  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return events[a].timestamp > events[b].timestamp;
  });
  return order;
}

EncodedSample encode_sample(const std::vector<BehaviorEvent>& selected, const TargetAd& target,
                            const VocabMap& vocab, const std::vector<std::string>& fields,
                            const std::string& category_field, double label) {
  EncodedSample s;
  s.label = label;
  s.behavior_ids.assign(fields.size(), {});
  for (const std::string& f : fields) {
    s.target_ids.push_back(target_has_field(f) ? vocab.id(f, field_value(target, f)) : 0);
  }
  s.category = vocab.id(category_field, field_value(target, category_field));

  if (selected.empty()) {
    for (auto& col : s.behavior_ids) col.push_back(0);
    s.positions.push_back(1);
    s.intervals.push_back(std::numeric_limits<std::int64_t>::max());
    return s;
  }
  std::vector<std::size_t> order = recency_order(selected);
  std::reverse(order.begin(), order.end());
  const std::size_t n = order.size();
  for (std::size_t r = 0; r < n; ++r) {
    const BehaviorEvent& e = selected[order[r]];
    if (e.timestamp > target.timestamp) throw DataError("behavior after target");
    for (std::size_t f = 0; f < fields.size(); ++f) {
      s.behavior_ids[f].push_back(vocab.id(fields[f], field_value(e, fields[f])));
    }
    s.positions.push_back(static_cast<int>(n - r));
    s.intervals.push_back(target.timestamp - e.timestamp);
  }
  return s;
}

}  // namespace longseq
