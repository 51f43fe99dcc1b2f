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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "longseq/trajectory/event.h"

namespace longseq {

// One labeled (user, target) pair; `user` indexes Dataset::users.
struct Sample {
  std::size_t user = 0;
  TargetAd target;
  double label = 0.0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Dataset {
  std::vector<Trajectory> users;  // events sorted by timestamp
  std::vector<Sample> samples;
  nlohmann::json manifest = nlohmann::json::object();
};

// On disk: events.jsonl (one event per line), samples.jsonl
// ({"user_id","target","label"} per line) and manifest.json.
void save_dataset(const std::filesystem::path& dir, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& dir);

std::string samples_to_jsonl(const Dataset& data);
std::string events_to_jsonl(const Dataset& data);

}  // namespace longseq
