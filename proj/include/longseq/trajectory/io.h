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

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "longseq/trajectory/event.h"
#include "longseq/trajectory/taxonomy.h"
#include "longseq/trajectory/vocab.h"

namespace longseq {

using Json = nlohmann::json;

struct Reject {
  std::size_t line_no = 0;  // 1-based
  std::string reason;
};

struct IngestResult {
  std::vector<BehaviorEvent> events;
  std::vector<Reject> rejects;
  std::size_t lines = 0;  // non-blank lines seen

  std::map<std::string, std::size_t> domain_counts() const;
};

// Reads one event per line. Bad lines go to `rejects` and reading continues.
// With a taxonomy, category paths are also checked against it.
IngestResult ingest_events(std::istream& in, const CategoryTaxonomy* taxonomy = nullptr);

// Throws DataError with the reject reason.
BehaviorEvent event_from_json(const Json& j, const CategoryTaxonomy* taxonomy = nullptr);
Json event_to_json(const BehaviorEvent& e);
TargetAd target_from_json(const Json& j);
Json target_to_json(const TargetAd& t);
ItemSideInfo side_from_json(const Json& j);
Json side_to_json(const ItemSideInfo& s);

void write_rejects(std::ostream& out, const std::vector<Reject>& rejects);
void write_events(std::ostream& out, const std::vector<BehaviorEvent>& events);

// {"fields": [...], "values": {"<field>": ["<id 1 value>", ...]}}; loaded
// vocabularies come back frozen.
Json vocab_to_json(const VocabMap& vocab);
VocabMap vocab_from_json(const Json& j);

// {"nodes": [{"id","name","display_name"?,"level","parent"?}],
//  "property_schema": {"<leaf id>": ["key", ...]}}
CategoryTaxonomy taxonomy_from_json(const Json& j);
// {"product_id","title","category_path":[...],"properties":[["k","v"],...] or {...}}
ProductRecord product_from_json(const nlohmann::ordered_json& j);

}  // namespace longseq
