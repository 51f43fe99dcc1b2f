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
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "longseq/harness/dataset.h"

namespace longseq {

// Planted effects:
//  category_decay  behaviors sharing the target's category add up with
//                  weights exp(-dt / tau_c), tau_c being a per-category time
//                  constant, and the label follows the saturated total.
//  noisy_fields    the label follows how the user engaged (click or
//                  conversion vs impression) with the target's category;
//                  creative_fp is label-free noise that tracks position.
//  high_order      only behaviors whose (category, scenario) pair is linked
//                  to the target's (category, scenario) pair matter.
//  multi_interest  each user has 2 to 4 interest categories; positives are
//                  drawn from them, negatives from the other categories.
enum class Effect { kCategoryDecay, kNoisyFields, kHighOrder, kMultiInterest };
std::string_view to_string(Effect e);
std::optional<Effect> parse_effect(std::string_view s);

struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t n_users = 1000;
  std::size_t targets_per_user = 10;
  std::size_t n_items = 200;
  std::size_t n_categories = 4;
  Effect effect = Effect::kCategoryDecay;
  double effect_strength = 1.0;  // 0 makes labels independent of everything
  std::size_t min_len = 8;
  std::size_t max_len = 16;
  double negative_ratio = 1.0;  // negatives per positive
  double horizon_days = 30.0;   // behaviors fall within this window before the target
  double tau_min_days = 2.0;    // category_decay: tau of category 0
  double tau_ratio = 10.0;      // category_decay: tau of the last category / tau_min

  void validate() const;
};

nlohmann::json synth_config_to_json(const SynthConfig& c);
// Rejects unknown keys.
SynthConfig synth_config_from_json(const nlohmann::json& j);

// Deterministic in the config. The manifest holds the config, the planted
// parameters, the positive rate and the AUC of the generating probabilities
// ("bayes_auc").
Dataset generate_synthetic(const SynthConfig& cfg);

// The generating probability of `target` for `user` under the manifest.
double planted_probability(const nlohmann::json& manifest, const Trajectory& user,
                           const TargetAd& target);

}  // namespace longseq
