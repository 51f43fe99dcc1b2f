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
#include <unordered_map>
#include <vector>

#include "longseq/trajectory/event.h"

namespace longseq {

// Per-field string -> dense id tables. Id 0 is reserved for out-of-vocabulary
// and padding; the empty string always maps to 0.
class VocabMap {
 public:
  VocabMap() = default;
  explicit VocabMap(std::vector<std::string> fields);

  // Returns the id of `value`, inserting it if new. StateError once frozen.
  std::int32_t add(const std::string& field, const std::string& value);
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  // StateError before freeze; 0 for unseen values.
  std::int32_t id(const std::string& field, const std::string& value) const;
  // "" for id 0; IndexError when id is out of range.
  const std::string& value(const std::string& field, std::int32_t id) const;
  // Table size including the reserved id.
  std::size_t size(const std::string& field) const;
  bool has_field(const std::string& field) const;
  const std::vector<std::string>& fields() const { return fields_; }
  std::size_t field_index(const std::string& field) const;

  friend bool operator==(const VocabMap& a, const VocabMap& b) {
    return a.fields_ == b.fields_ && a.values_ == b.values_ && a.frozen_ == b.frozen_;
  }

 private:
  std::vector<std::string> fields_;
  std::vector<std::vector<std::string>> values_;  // values_[f][0] == ""
  std::vector<std::unordered_map<std::string, std::int32_t>> index_;
  bool frozen_ = false;
};

// Ids are assigned in first-seen order: events first (in order), then targets.
VocabMap build_vocab(const std::vector<BehaviorEvent>& events,
                     const std::vector<std::string>& fields,
                     const std::vector<TargetAd>& targets = {});

// One id per vocab field, in vocab field order.
std::vector<std::int32_t> encode_event(const BehaviorEvent& e, const VocabMap& vocab);
std::vector<std::int32_t> encode_target(const TargetAd& t, const VocabMap& vocab);
// Field name -> decoded string, in vocab field order.
std::vector<std::pair<std::string, std::string>> decode(const std::vector<std::int32_t>& ids,
                                                        const VocabMap& vocab);

}  // namespace longseq
