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

#include "longseq/trajectory/trajectory.h"

#include <algorithm>
#include <set>
#include <tuple>

namespace longseq {

Consolidated consolidate(const std::vector<BehaviorEvent>& events) {
  Consolidated out;
  for (const BehaviorEvent& e : events) {
    Trajectory& t = out.users[e.user_id];
    t.user_id = e.user_id;
    t.events.push_back(e);
  }
  for (auto& [user, traj] : out.users) {
    std::stable_sort(traj.events.begin(), traj.events.end(),
                     [](const BehaviorEvent& a, const BehaviorEvent& b) {
                       return a.timestamp < b.timestamp;
                     });
    std::set<std::tuple<std::string, std::int64_t, int>> seen;
    std::vector<BehaviorEvent> kept;
    kept.reserve(traj.events.size());
    for (BehaviorEvent& e : traj.events) {
      if (!seen.emplace(e.item_id, e.timestamp, static_cast<int>(e.action_type)).second) {
        ++out.duplicates;
        continue;
      }
      kept.push_back(std::move(e));
    }
    traj.events = std::move(kept);
    out.retained += traj.events.size();
  }
  return out;
}

std::vector<BehaviorEvent> flatten(const Consolidated& c) {
  std::vector<BehaviorEvent> out;
  out.reserve(c.retained);
  for (const auto& [user, traj] : c.users) {
    out.insert(out.end(), traj.events.begin(), traj.events.end());
  }
  return out;
}

Trajectory truncate_window(const Trajectory& traj, std::size_t max_len, std::int64_t max_age,
                           std::int64_t now) {
  Trajectory out;
  out.user_id = traj.user_id;
  std::vector<const BehaviorEvent*> fresh;
  for (const BehaviorEvent& e : traj.events) {
    // now - t <= max_age, written to avoid overflow when max_age is unbounded.
    if (max_age == kUnboundedAge || now - e.timestamp <= max_age) fresh.push_back(&e);
  }
  const std::size_t start = fresh.size() > max_len ? fresh.size() - max_len : 0;
  for (std::size_t i = start; i < fresh.size(); ++i) out.events.push_back(*fresh[i]);
  return out;
}

}  // namespace longseq
