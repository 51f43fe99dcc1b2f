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

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "longseq/core/error.h"
#include "longseq/core/random.h"
#include "longseq/trajectory/io.h"
#include "longseq/trajectory/trajectory.h"
#include "longseq/trajectory/vocab.h"

using namespace longseq;

namespace {

BehaviorEvent ev(const std::string& user, const std::string& item, std::int64_t ts,
                 ActionType type = ActionType::kClick) {
  BehaviorEvent e;
  e.user_id = user;
  e.item_id = item;
  e.timestamp = ts;
  e.action_type = type;
  e.action_scenario = ActionScenario::kChannels;
  e.action_domain = ActionDomain::kAd;
  return e;
}

std::string line_for(const BehaviorEvent& e) { return event_to_json(e).dump(); }

CategoryTaxonomy load_taxonomy() {
  std::ifstream in("data/taxonomy.json");
  REQUIRE(in.good());
  return taxonomy_from_json(Json::parse(in));
}

std::vector<BehaviorEvent> load_events(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  IngestResult r = ingest_events(in);
  REQUIRE(r.rejects.empty());
  return r.events;
}

}  // namespace

TEST_CASE("ingest: empty stream") {
  std::istringstream in("");
  IngestResult r = ingest_events(in);
  CHECK(r.events.empty());
  CHECK(r.rejects.empty());
}

TEST_CASE("ingest: unknown action type is rejected and ingestion continues") {
  std::ostringstream s;
  s << line_for(ev("u1", "a", 10)) << '\n' << line_for(ev("u1", "b", 11)) << '\n';
  Json bad = event_to_json(ev("u2", "c", 12));
  bad["action_type"] = "hover";
  s << bad.dump() << '\n' << line_for(ev("u2", "d", 13)) << '\n';
  std::istringstream in(s.str());
  IngestResult r = ingest_events(in);
  CHECK(r.events.size() == 3);
  REQUIRE(r.rejects.size() == 1);
  CHECK(r.rejects[0].line_no == 3);
  CHECK(r.rejects[0].reason == "unknown action_type");
}

TEST_CASE("ingest: each validation failure has its own reason") {
  auto reason_for = [](const std::string& line) {
    std::istringstream in(line + "\n");
    IngestResult r = ingest_events(in);
    REQUIRE(r.rejects.size() == 1);
    return r.rejects[0].reason;
  };
  Json base = event_to_json(ev("u", "i", 5));
  CHECK(reason_for("{not json") == "malformed JSON");

  Json j = base;
  j.erase("user_id");
  CHECK(reason_for(j.dump()) == "missing field user_id");

  j = base;
  j["timestamp"] = 0;
  CHECK(reason_for(j.dump()) == "timestamp must be positive");

  j = base;
  j["action_scenario"] = "moments";
  j["action_domain"] = "content";
  CHECK(reason_for(j.dump()) == "action_domain inconsistent with action_scenario");

  j = base;
  j["action_scenario"] = "radio";
  CHECK(reason_for(j.dump()) == "unknown action_scenario");

  j = base;
  j["side"]["cat_l3"] = "c_mmo";
  CHECK(reason_for(j.dump()) == "inconsistent category path");
}

TEST_CASE("ingest: taxonomy-checked category paths") {
  CategoryTaxonomy tax = load_taxonomy();
  Json good = event_to_json(ev("u", "i", 5));
  good["side"]["cat_l1"] = "c_food";
  good["side"]["cat_l2"] = "c_alcohol";
  good["side"]["cat_l3"] = "c_redwine";
  Json bad = good;
  bad["side"]["cat_l2"] = "c_rpg";
  std::istringstream in(good.dump() + "\n" + bad.dump() + "\n");
  IngestResult r = ingest_events(in, &tax);
  CHECK(r.events.size() == 1);
  REQUIRE(r.rejects.size() == 1);
  CHECK(r.rejects[0].line_no == 2);
}

TEST_CASE("ingest: 100-event fixture matches its manifest") {
  std::ifstream in("data/events_100.jsonl");
  REQUIRE(in.good());
  CategoryTaxonomy tax = load_taxonomy();
  IngestResult r = ingest_events(in, &tax);
  std::ifstream min("data/events_100.manifest.json");
  Json manifest = Json::parse(min);
  CHECK(r.rejects.empty());
  CHECK(r.events.size() == manifest["lines"].get<std::size_t>());
  auto counts = r.domain_counts();
  for (const auto& [domain, n] : manifest["domain_counts"].items()) {
    CHECK(counts[domain] == n.get<std::size_t>());
  }
}

TEST_CASE("json round trip of events and targets") {
  for (const BehaviorEvent& e : load_events("data/events_100.jsonl")) {
    CHECK(event_from_json(event_to_json(e)) == e);
  }
  TargetAd t;
  t.item_id = "t1";
  t.timestamp = 99;
  t.scenario = ActionScenario::kNews;
  t.side.cat_l1 = "c_games";
  CHECK(target_from_json(target_to_json(t)) == t);
}

TEST_CASE("consolidate: sorting and exact duplicates") {
  Consolidated c = consolidate({ev("u", "a", 5), ev("u", "b", 1), ev("u", "c", 3)});
  std::vector<std::int64_t> ts;
  for (const auto& e : c.users.at("u").events) ts.push_back(e.timestamp);
  CHECK(ts == std::vector<std::int64_t>{1, 3, 5});

  c = consolidate({ev("u", "a", 5), ev("u", "a", 5)});
  CHECK(c.retained == 1);
  CHECK(c.duplicates == 1);

  // Same instant, different action: both kept, input order preserved.
  c = consolidate({ev("u", "a", 5, ActionType::kClick), ev("u", "a", 5, ActionType::kImpression)});
  CHECK(c.retained == 2);
  CHECK(c.users.at("u").events[0].action_type == ActionType::kClick);
}

TEST_CASE("consolidate agrees with a set-based oracle and is idempotent") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    std::vector<BehaviorEvent> events;
    for (int u = 0; u < 10; ++u) {
      for (int k = 0; k < 50; ++k) {
        events.push_back(ev("u" + std::to_string(u), "i" + std::to_string(rng.below(30)),
                            1 + static_cast<std::int64_t>(rng.below(1000)),
                            kAllActionTypes[rng.below(kAllActionTypes.size())]));
      }
    }
    const std::size_t originals = events.size();
    for (std::size_t k = 0; k < originals / 20; ++k) events.push_back(events[rng.below(originals)]);
    rng.shuffle(events);

    std::map<std::string, std::set<std::tuple<std::string, std::int64_t, int>>> oracle;
    for (const auto& e : events) {
      oracle[e.user_id].insert({e.item_id, e.timestamp, static_cast<int>(e.action_type)});
    }
    Consolidated c = consolidate(events);
    std::size_t total = 0;
    for (const auto& [user, keys] : oracle) {
      CHECK(c.users.at(user).events.size() == keys.size());
      CHECK(c.users.at(user).is_sorted());
      total += keys.size();
    }
    CHECK(c.retained == total);
    CHECK(c.duplicates == events.size() - total);

    Consolidated again = consolidate(flatten(c));
    CHECK(again.duplicates == 0);
    CHECK(flatten(again) == flatten(c));
  }
}

TEST_CASE("truncate_window") {
  Trajectory t;
  t.user_id = "u";
  for (int i = 1; i <= 20; ++i) t.events.push_back(ev("u", "i" + std::to_string(i), i * 10));

  CHECK(truncate_window(t, 0).events.empty());
  CHECK(truncate_window(t, 20).events == t.events);
  CHECK(truncate_window(t, 1000).events == t.events);

  Trajectory last5 = truncate_window(t, 5);
  std::vector<std::int64_t> got, want;
  for (const auto& e : last5.events) got.push_back(e.timestamp);
  for (const auto& e : t.events) want.push_back(e.timestamp);
  std::sort(want.rbegin(), want.rend());
  want.resize(5);
  std::sort(want.begin(), want.end());
  CHECK(got == want);

  // Age filter first (keeps t >= 150), then length.
  Trajectory aged = truncate_window(t, 3, 50, 200);
  REQUIRE(aged.events.size() == 3);
  CHECK(aged.events.front().timestamp == 180);
  CHECK(truncate_window(t, 100, 50, 200).events.size() == 6);
}

TEST_CASE("build_spu reproduces the two worked cases") {
  CategoryTaxonomy tax = load_taxonomy();
  ProductRecord phone{"p1", "Apple iPhone", {"c_mobile", "c_phones"},
                      {{"Brand", "Apple"}, {"Model", "iPhone 16 Pro Max"}}};
  CHECK(build_spu(phone, tax).key == "Apple iPhone 16 Pro Max Mobile Phone");

  ProductRecord wine{"p2", "Penfolds Bin707", {"c_food", "c_alcohol", "c_redwine"},
                     {{"Brand", "Penfolds"},
                      {"Origin", "Australia"},
                      {"Version", "Bin707"},
                      {"Sweetness", "Dry"},
                      {"Net Content", "750ml"}}};
  CHECK(build_spu(wine, tax).key == "Penfolds Australia Dry 750ml Red Wine");

  ProductRecord bare{"p3", "", {"c_food", "c_alcohol", "c_redwine"}, {}};
  CHECK(build_spu(bare, tax).key == "Red Wine");

  ProductRecord beer{"p4", "", {"c_food", "c_alcohol", "c_beer"}, {{"Brand", "X"}}};
  CHECK(build_spu(beer, tax).key == "Beer");
}

TEST_CASE("build_spu ids are normalization stable") {
  CHECK(spu_id_for_key("Apple iPhone 16 Pro Max Mobile Phone") ==
        spu_id_for_key("  apple   IPHONE 16\tPro max mobile phone "));
  CHECK(spu_id_for_key("Apple iPhone") != spu_id_for_key("Apple iPhone 16"));
  // FNV-1a 64 reference values.
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(spu_id_for_key("A") == "af63dc4c8601ec8c");
}

TEST_CASE("build_spu rejects unresolvable paths") {
  CategoryTaxonomy tax = load_taxonomy();
  ProductRecord p{"p", "", {"c_food", "c_rpg"}, {}};
  CHECK_THROWS_AS(build_spu(p, tax), DataError);
  p.category_path = {"c_food", "c_alcohol"};  // not a leaf
  CHECK_THROWS_AS(build_spu(p, tax), DataError);
  p.category_path = {"nope"};
  CHECK_THROWS_AS(build_spu(p, tax), DataError);
}

TEST_CASE("taxonomy rejects level mismatches") {
  CategoryTaxonomy tax;
  tax.add_node({"a", "A", "", 1, ""});
  CHECK_THROWS_AS(tax.add_node({"b", "B", "", 3, "a"}), ConfigError);
  CHECK_THROWS_AS(tax.add_node({"a", "A", "", 1, ""}), ConfigError);
  CHECK_THROWS_AS(tax.add_node({"c", "C", "", 1, "a"}), ConfigError);
  tax.add_node({"d", "D", "", 2, "missing"});
  CHECK_THROWS_AS(tax.validate(), ConfigError);
}

TEST_CASE("vocab: first-seen ids, unseen is 0, freeze discipline") {
  std::vector<BehaviorEvent> events = {ev("u", "a", 1), ev("u", "b", 2)};
  events[0].side.cat_l1 = "B";
  events[1].side.cat_l1 = "A";
  VocabMap v = build_vocab(events, {"cat_l1", "item_id"});
  CHECK(v.id("cat_l1", "B") == 1);
  CHECK(v.id("cat_l1", "A") == 2);
  CHECK(v.id("cat_l1", "Z") == 0);
  CHECK(v.id("cat_l1", "") == 0);
  CHECK(v.size("cat_l1") == 3);
  CHECK_THROWS_AS(v.add("cat_l1", "C"), StateError);

  VocabMap open({"cat_l1"});
  open.add("cat_l1", "x");
  CHECK_THROWS_AS(open.id("cat_l1", "x"), StateError);
  CHECK_THROWS_AS(encode_event(events[0], open), StateError);
  CHECK_THROWS_AS(VocabMap({"colour"}), ConfigError);
}

TEST_CASE("vocab: decode(encode(e)) round trip on 1k events") {
  std::vector<BehaviorEvent> events = load_events("data/events_1k.jsonl");
  REQUIRE(events.size() == 1000);
  std::vector<std::string> fields(kEventFields.begin(), kEventFields.end());
  VocabMap v = build_vocab(events, fields);
  for (const std::string& f : fields) {
    std::set<std::string> distinct;
    for (const auto& e : events) {
      if (!field_value(e, f).empty()) distinct.insert(field_value(e, f));
    }
    CHECK(v.size(f) == distinct.size() + 1);
  }
  for (const auto& e : events) {
    auto ids = encode_event(e, v);
    auto decoded = decode(ids, v);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      CHECK(decoded[i].second == field_value(e, fields[i]));
      if (!field_value(e, fields[i]).empty()) CHECK(ids[i] > 0);
    }
  }
}
