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

#include "longseq/trajectory/io.h"

#include <istream>
#include <ostream>

#include "longseq/core/error.h"

namespace longseq {
namespace {

constexpr const char* kSideKeys[] = {"creative_fp",      "product_fp",         "spu_id",
                                     "cat_l1",           "cat_l2",             "cat_l3",
                                     "marketing_target", "advertiser_account", "ad_industry"};

std::string& side_slot(ItemSideInfo& s, int i) {
  std::string* slots[] = {&s.creative_fp,      &s.product_fp,         &s.spu_id,
                          &s.cat_l1,           &s.cat_l2,             &s.cat_l3,
                          &s.marketing_target, &s.advertiser_account, &s.ad_industry};
  return *slots[i];
}

const Json& require(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) throw DataError(std::string("missing field ") + key);
  return *it;
}

std::string require_string(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_string()) throw DataError(std::string("field ") + key + " must be a string");
  return v.get<std::string>();
}

std::string optional_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return "";
  if (!it->is_string()) throw DataError(std::string("field ") + key + " must be a string");
  return it->get<std::string>();
}

std::int64_t require_int(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number_integer()) throw DataError(std::string("field ") + key + " must be an integer");
  return v.get<std::int64_t>();
}

}  // namespace

ItemSideInfo side_from_json(const Json& j) {
  ItemSideInfo s;
  if (j.is_null()) return s;
  if (!j.is_object()) throw DataError("field side must be an object");
  for (int i = 0; i < 9; ++i) side_slot(s, i) = optional_string(j, kSideKeys[i]);
  return s;
}

Json side_to_json(const ItemSideInfo& s) {
  Json j = Json::object();
  for (int i = 0; i < 9; ++i) j[kSideKeys[i]] = side_slot(const_cast<ItemSideInfo&>(s), i);
  return j;
}

BehaviorEvent event_from_json(const Json& j, const CategoryTaxonomy* taxonomy) {
  if (!j.is_object()) throw DataError("record is not an object");
  BehaviorEvent e;
  e.user_id = require_string(j, "user_id");
  e.item_id = require_string(j, "item_id");
  e.timestamp = require_int(j, "timestamp");
  if (e.timestamp <= 0) throw DataError("timestamp must be positive");

  auto type = parse_action_type(require_string(j, "action_type"));
  if (!type) throw DataError("unknown action_type");
  auto scenario = parse_action_scenario(require_string(j, "action_scenario"));
  if (!scenario) throw DataError("unknown action_scenario");
  auto domain = parse_action_domain(require_string(j, "action_domain"));
  if (!domain) throw DataError("unknown action_domain");
  if (!domain_allowed(*scenario, *domain)) {
    throw DataError("action_domain inconsistent with action_scenario");
  }
  e.action_type = *type;
  e.action_scenario = *scenario;
  e.action_domain = *domain;
  e.action_detail = optional_string(j, "action_detail");

  auto side = j.find("side");
  e.side = side == j.end() ? ItemSideInfo{} : side_from_json(*side);
  const ItemSideInfo& s = e.side;
  const bool gap = (s.cat_l1.empty() && !s.cat_l2.empty()) || (s.cat_l2.empty() && !s.cat_l3.empty());
  if (gap || (taxonomy && !taxonomy->path_consistent(s.cat_l1, s.cat_l2, s.cat_l3))) {
    throw DataError("inconsistent category path");
  }
  return e;
}

Json event_to_json(const BehaviorEvent& e) {
  Json j = Json::object();
  j["user_id"] = e.user_id;
  j["item_id"] = e.item_id;
  j["timestamp"] = e.timestamp;
  j["action_type"] = std::string(to_string(e.action_type));
  j["action_scenario"] = std::string(to_string(e.action_scenario));
  j["action_domain"] = std::string(to_string(e.action_domain));
  j["action_detail"] = e.action_detail;
  j["side"] = side_to_json(e.side);
  return j;
}

TargetAd target_from_json(const Json& j) {
  if (!j.is_object()) throw DataError("target is not an object");
  TargetAd t;
  t.item_id = require_string(j, "item_id");
  t.timestamp = require_int(j, "timestamp");
  if (t.timestamp <= 0) throw DataError("timestamp must be positive");
  auto scenario = parse_action_scenario(require_string(j, "scenario"));
  if (!scenario) throw DataError("unknown scenario");
  t.scenario = *scenario;
  auto side = j.find("side");
  t.side = side == j.end() ? ItemSideInfo{} : side_from_json(*side);
  return t;
}

Json target_to_json(const TargetAd& t) {
  Json j = Json::object();
  j["item_id"] = t.item_id;
  j["timestamp"] = t.timestamp;
  j["scenario"] = std::string(to_string(t.scenario));
  j["side"] = side_to_json(t.side);
  return j;
}

std::map<std::string, std::size_t> IngestResult::domain_counts() const {
  std::map<std::string, std::size_t> out;
  for (const BehaviorEvent& e : events) ++out[std::string(to_string(e.action_domain))];
  return out;
}

IngestResult ingest_events(std::istream& in, const CategoryTaxonomy* taxonomy) {
  IngestResult r;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++r.lines;
    Json j = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      r.rejects.push_back({line_no, "malformed JSON"});
      continue;
    }
    try {
      r.events.push_back(event_from_json(j, taxonomy));
    } catch (const DataError& err) {
      r.rejects.push_back({line_no, err.what()});
    } catch (const Json::exception& err) {
      r.rejects.push_back({line_no, std::string("bad value: ") + err.what()});
    }
  }
  return r;
}

void write_rejects(std::ostream& out, const std::vector<Reject>& rejects) {
  for (const Reject& r : rejects) {
    Json j = {{"line_no", r.line_no}, {"reason", r.reason}};
    out << j.dump() << '\n';
  }
}

void write_events(std::ostream& out, const std::vector<BehaviorEvent>& events) {
  for (const BehaviorEvent& e : events) out << event_to_json(e).dump() << '\n';
}

Json vocab_to_json(const VocabMap& vocab) {
  Json j;
  j["fields"] = vocab.fields();
  Json values = Json::object();
  for (const std::string& f : vocab.fields()) {
    Json list = Json::array();
    for (std::size_t id = 1; id < vocab.size(f); ++id) {
      list.push_back(vocab.value(f, static_cast<std::int32_t>(id)));
    }
    values[f] = std::move(list);
  }
  j["values"] = std::move(values);
  return j;
}

VocabMap vocab_from_json(const Json& j) {
  try {
    VocabMap vocab(j.at("fields").get<std::vector<std::string>>());
    for (const std::string& f : vocab.fields()) {
      const auto list = j.at("values").at(f).get<std::vector<std::string>>();
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i].empty() || vocab.add(f, list[i]) != static_cast<std::int32_t>(i + 1)) {
          throw DataError("vocab field '" + f + "' has an empty or repeated value");
        }
      }
    }
    vocab.freeze();
    return vocab;
  } catch (const Json::exception& e) {
    throw DataError(std::string("bad vocab document: ") + e.what());
  }
}

CategoryTaxonomy taxonomy_from_json(const Json& j) {
  CategoryTaxonomy tax;
  if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array()) {
    throw ConfigError("taxonomy must be an object with a 'nodes' array");
  }
  try {
    for (const Json& n : j["nodes"]) {
      CategoryNode node;
      node.id = n.at("id").get<std::string>();
      node.name = n.at("name").get<std::string>();
      node.display_name = n.value("display_name", std::string());
      node.level = n.at("level").get<int>();
      if (n.contains("parent") && !n["parent"].is_null()) node.parent = n["parent"].get<std::string>();
      tax.add_node(std::move(node));
    }
    if (j.contains("property_schema")) {
      for (const auto& [leaf, keys] : j["property_schema"].items()) {
        tax.set_schema(leaf, keys.get<std::vector<std::string>>());
      }
    }
  } catch (const Json::exception& err) {
    throw ConfigError(std::string("bad taxonomy: ") + err.what());
  }
  tax.validate();
  return tax;
}

ProductRecord product_from_json(const nlohmann::ordered_json& j) {
  ProductRecord p;
  try {
    p.product_id = j.value("product_id", std::string());
    p.title = j.value("title", std::string());
    p.category_path = j.at("category_path").get<std::vector<std::string>>();
    const auto& props = j.contains("properties") ? j["properties"] : nlohmann::ordered_json::array();
    if (props.is_object()) {
      for (const auto& [k, v] : props.items()) p.properties.emplace_back(k, v.get<std::string>());
    } else {
      for (const auto& kv : props) {
        p.properties.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
      }
    }
  } catch (const nlohmann::ordered_json::exception& err) {
    throw DataError(std::string("bad product record: ") + err.what());
  }
  return p;
}

}  // namespace longseq
