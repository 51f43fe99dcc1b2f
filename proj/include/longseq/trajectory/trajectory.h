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
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "longseq/trajectory/event.h"

namespace longseq {

struct Consolidated {
  std::map<std::string, Trajectory> users;  // ordered by user id
  std::size_t retained = 0;
  std::size_t duplicates = 0;
};

// Groups by user, sorts by timestamp (stable), and drops repeats of the
// (user, item, timestamp, action_type) key, keeping the first occurrence.
Consolidated consolidate(const std::vector<BehaviorEvent>& events);

// All events of all users, users in id order.
std::vector<BehaviorEvent> flatten(const Consolidated& c);

inline constexpr std::int64_t kUnboundedAge = std::numeric_limits<std::int64_t>::max();

// Keeps events with now - t <= max_age, then the latest max_len of those.
Trajectory truncate_window(const Trajectory& traj, std::size_t max_len,
                           std::int64_t max_age = kUnboundedAge, std::int64_t now = 0);

}  // namespace longseq
