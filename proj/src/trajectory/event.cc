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

#include "longseq/trajectory/event.h"

#include <algorithm>

#include "longseq/core/error.h"

namespace longseq {
namespace {

constexpr std::array<std::string_view, 7> kActionTypeNames = {
    "impression", "click", "conversion", "play", "like", "follow", "comment"};
constexpr std::array<std::string_view, 6> kScenarioNames = {
    "moments", "channels", "official_accounts", "news", "video", "content_feed"};
constexpr std::array<std::string_view, 2> kDomainNames = {"ad", "content"};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ActionType v) { return kActionTypeNames[static_cast<int>(v)]; }
std::string_view to_string(ActionScenario v) { return kScenarioNames[static_cast<int>(v)]; }
std::string_view to_string(ActionDomain v) { return kDomainNames[static_cast<int>(v)]; }

std::optional<ActionType> parse_action_type(std::string_view s) {
  return lookup<ActionType>(kActionTypeNames, s);
}
std::optional<ActionScenario> parse_action_scenario(std::string_view s) {
  return lookup<ActionScenario>(kScenarioNames, s);
}
std::optional<ActionDomain> parse_action_domain(std::string_view s) {
  return lookup<ActionDomain>(kDomainNames, s);
}

bool domain_allowed(ActionScenario scenario, ActionDomain domain) {
  switch (scenario) {
    case ActionScenario::kMoments:
      return domain == ActionDomain::kAd;
    case ActionScenario::kContentFeed:
      return domain == ActionDomain::kContent;
    case ActionScenario::kChannels:
    case ActionScenario::kOfficialAccounts:
    case ActionScenario::kNews:
    case ActionScenario::kVideo:
      return true;
  }
  return false;
}

const std::string& ItemSideInfo::category(int level) const {
  switch (level) {
    case 1:
      return cat_l1;
    case 2:
      return cat_l2;
    case 3:
      return cat_l3;
  }
  throw ConfigError("category level must be 1, 2 or 3, got " + std::to_string(level));
}

bool Trajectory::is_sorted() const {
  return std::is_sorted(events.begin(), events.end(),
                        [](const BehaviorEvent& a, const BehaviorEvent& b) {
                          return a.timestamp < b.timestamp;
                        });
}

bool is_event_field(std::string_view field) {
  return std::find(kEventFields.begin(), kEventFields.end(), field) != kEventFields.end();
}

namespace {

const std::string* side_field(const ItemSideInfo& s, std::string_view field) {
  if (field == "creative_fp") return &s.creative_fp;
  if (field == "product_fp") return &s.product_fp;
  if (field == "spu_id") return &s.spu_id;
  if (field == "cat_l1") return &s.cat_l1;
  if (field == "cat_l2") return &s.cat_l2;
  if (field == "cat_l3") return &s.cat_l3;
  if (field == "marketing_target") return &s.marketing_target;
  if (field == "advertiser_account") return &s.advertiser_account;
  if (field == "ad_industry") return &s.ad_industry;
  return nullptr;
}

}  // namespace

std::string field_value(const BehaviorEvent& e, std::string_view field) {
  if (field == "item_id") return e.item_id;
  if (const std::string* s = side_field(e.side, field)) return *s;
  if (field == "action_type") return std::string(to_string(e.action_type));
  if (field == "action_scenario") return std::string(to_string(e.action_scenario));
  if (field == "action_domain") return std::string(to_string(e.action_domain));
  if (field == "action_detail") return e.action_detail;
  throw ConfigError("unknown event field '" + std::string(field) + "'");
}

std::string field_value(const TargetAd& t, std::string_view field) {
  if (field == "item_id") return t.item_id;
  if (const std::string* s = side_field(t.side, field)) return *s;
  if (field == "action_scenario") return std::string(to_string(t.scenario));
  if (is_event_field(field)) return "";
  throw ConfigError("unknown event field '" + std::string(field) + "'");
}

}  // namespace longseq
