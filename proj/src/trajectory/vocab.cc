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

#include "longseq/trajectory/vocab.h"

#include "longseq/core/error.h"

namespace longseq {

VocabMap::VocabMap(std::vector<std::string> fields) : fields_(std::move(fields)) {
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (!is_event_field(fields_[i])) throw ConfigError("unknown vocab field '" + fields_[i] + "'");
    for (std::size_t j = 0; j < i; ++j) {
      if (fields_[j] == fields_[i]) throw ConfigError("duplicate vocab field '" + fields_[i] + "'");
    }
  }
  values_.assign(fields_.size(), std::vector<std::string>{""});
  index_.resize(fields_.size());
}

std::size_t VocabMap::field_index(const std::string& field) const {
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (fields_[i] == field) return i;
  }
  throw IndexError("vocab has no field '" + field + "'");
}

bool VocabMap::has_field(const std::string& field) const {
  for (const auto& f : fields_) {
    if (f == field) return true;
  }
  return false;
}

std::int32_t VocabMap::add(const std::string& field, const std::string& value) {
  if (frozen_) throw StateError("vocab is frozen; cannot add '" + field + "' value");
  const std::size_t f = field_index(field);
  if (value.empty()) return 0;
  auto [it, inserted] =
      index_[f].emplace(value, static_cast<std::int32_t>(values_[f].size()));
  if (inserted) values_[f].push_back(value);
  return it->second;
}

std::int32_t VocabMap::id(const std::string& field, const std::string& value) const {
  if (!frozen_) throw StateError("vocab must be frozen before encoding");
  const std::size_t f = field_index(field);
  auto it = index_[f].find(value);
  return it == index_[f].end() ? 0 : it->second;
}

const std::string& VocabMap::value(const std::string& field, std::int32_t id) const {
  const std::size_t f = field_index(field);
  if (id < 0 || static_cast<std::size_t>(id) >= values_[f].size()) {
    throw IndexError("id " + std::to_string(id) + " out of range for vocab '" + field +
                     "' of size " + std::to_string(values_[f].size()));
  }
  return values_[f][id];
}

std::size_t VocabMap::size(const std::string& field) const {
  return values_[field_index(field)].size();
}

VocabMap build_vocab(const std::vector<BehaviorEvent>& events,
                     const std::vector<std::string>& fields,
                     const std::vector<TargetAd>& targets) {
  VocabMap vocab(fields);
  for (const BehaviorEvent& e : events) {
    for (const std::string& f : fields) vocab.add(f, field_value(e, f));
  }
  for (const TargetAd& t : targets) {
    for (const std::string& f : fields) vocab.add(f, field_value(t, f));
  }
  vocab.freeze();
  return vocab;
}

std::vector<std::int32_t> encode_event(const BehaviorEvent& e, const VocabMap& vocab) {
  std::vector<std::int32_t> out;
  out.reserve(vocab.fields().size());
  for (const std::string& f : vocab.fields()) out.push_back(vocab.id(f, field_value(e, f)));
  return out;
}

std::vector<std::int32_t> encode_target(const TargetAd& t, const VocabMap& vocab) {
  std::vector<std::int32_t> out;
  out.reserve(vocab.fields().size());
  for (const std::string& f : vocab.fields()) out.push_back(vocab.id(f, field_value(t, f)));
  return out;
}

std::vector<std::pair<std::string, std::string>> decode(const std::vector<std::int32_t>& ids,
                                                        const VocabMap& vocab) {
  const auto& fields = vocab.fields();
  if (ids.size() != fields.size()) {
    throw DimensionError("decode expects " + std::to_string(fields.size()) + " ids, got " +
                         std::to_string(ids.size()));
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out.emplace_back(fields[i], vocab.value(fields[i], ids[i]));
  return out;
}

}  // namespace longseq
