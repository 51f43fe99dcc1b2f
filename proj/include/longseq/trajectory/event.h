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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace longseq {

enum class ActionType { kImpression, kClick, kConversion, kPlay, kLike, kFollow, kComment };
enum class ActionScenario { kMoments, kChannels, kOfficialAccounts, kNews, kVideo, kContentFeed };
enum class ActionDomain { kAd, kContent };

inline constexpr std::array<ActionType, 7> kAllActionTypes = {
    ActionType::kImpression, ActionType::kClick,  ActionType::kConversion, ActionType::kPlay,
    ActionType::kLike,       ActionType::kFollow, ActionType::kComment};
inline constexpr std::array<ActionScenario, 6> kAllScenarios = {
    ActionScenario::kMoments, ActionScenario::kChannels, ActionScenario::kOfficialAccounts,
    ActionScenario::kNews,    ActionScenario::kVideo,    ActionScenario::kContentFeed};

std::string_view to_string(ActionType v);
std::string_view to_string(ActionScenario v);
std::string_view to_string(ActionDomain v);
std::optional<ActionType> parse_action_type(std::string_view s);
std::optional<ActionScenario> parse_action_scenario(std::string_view s);
std::optional<ActionDomain> parse_action_domain(std::string_view s);

// Scenario -> domain table. Moments only carries ads and the content feed only
// carries content; the other surfaces carry both.
bool domain_allowed(ActionScenario scenario, ActionDomain domain);

// Ten-aspect item side info (item id lives on the event / target itself).
struct ItemSideInfo {
  std::string creative_fp;
  std::string product_fp;
  std::string spu_id;
  std::string cat_l1;
  std::string cat_l2;
  std::string cat_l3;
  std::string marketing_target;
  std::string advertiser_account;
  std::string ad_industry;

  // Category id at level 1..3; empty when the item has no path at that level.
  const std::string& category(int level) const;

  friend bool operator==(const ItemSideInfo&, const ItemSideInfo&) = default;
};

struct BehaviorEvent {
  std::string user_id;
  std::string item_id;
  std::int64_t timestamp = 0;
  ActionType action_type = ActionType::kImpression;
  ActionScenario action_scenario = ActionScenario::kMoments;
  ActionDomain action_domain = ActionDomain::kAd;
  std::string action_detail;
  ItemSideInfo side;

  friend bool operator==(const BehaviorEvent&, const BehaviorEvent&) = default;
};

// Candidate ad. `scenario` is the surface the request comes from; the
// category path C(t) is side.cat_l1..cat_l3.
struct TargetAd {
  std::string item_id;
  std::int64_t timestamp = 0;
  ActionScenario scenario = ActionScenario::kMoments;
  ItemSideInfo side;

  friend bool operator==(const TargetAd&, const TargetAd&) = default;
};

// Events of one user, ascending by timestamp; equal timestamps keep input
// order.
struct Trajectory {
  std::string user_id;
  std::vector<BehaviorEvent> events;

  bool is_sorted() const;
};

// Vocabulary-addressable fields of an event, in encoding order.
inline constexpr std::array<std::string_view, 14> kEventFields = {
    "item_id",   "creative_fp",      "product_fp",         "spu_id",      "cat_l1",
    "cat_l2",    "cat_l3",           "marketing_target",   "advertiser_account",
    "ad_industry", "action_type",    "action_scenario",    "action_domain",
    "action_detail"};

bool is_event_field(std::string_view field);
// Value of `field` on an event. Throws ConfigError for unknown fields.
std::string field_value(const BehaviorEvent& e, std::string_view field);
// Value of `field` on a target: item/side fields directly, `action_scenario`
// is the request scenario; behavior-only fields yield "".
std::string field_value(const TargetAd& t, std::string_view field);

}  // namespace longseq
