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

#include "longseq/harness/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "longseq/core/error.h"
#include "longseq/core/random.h"
#include "longseq/harness/metrics.h"
#include "longseq/models/temporal.h"
#include "longseq/trajectory/io.h"

namespace longseq {
namespace {

constexpr std::int64_t kBaseTime = 1'700'000'000;
constexpr const char* kEffectNames[] = {"category_decay", "noisy_fields", "high_order",
                                        "multi_interest"};
constexpr ActionScenario kAdScenarios[] = {ActionScenario::kMoments, ActionScenario::kChannels,
                                           ActionScenario::kOfficialAccounts, ActionScenario::kNews,
                                           ActionScenario::kVideo};
constexpr std::size_t kNumAdScenarios = std::size(kAdScenarios);

std::string category_name(std::size_t c) { return "c" + std::to_string(c); }

std::size_t category_index(const std::string& name) {
  if (name.size() < 2 || name[0] != 'c') throw DataError("not a synthetic category: '" + name + "'");
  return std::stoul(name.substr(1));
}

std::size_t scenario_index(ActionScenario s) {
  for (std::size_t i = 0; i < kNumAdScenarios; ++i) {
    if (kAdScenarios[i] == s) return i;
  }
  throw DataError("scenario outside the synthetic ad scenarios");
}

std::string user_name(std::size_t u) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "u%06zu", u);
  return buf;
}

double engagement(const BehaviorEvent& e) { return e.action_type == ActionType::kImpression ? -1.0 : 1.0; }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double tau_days(const SynthConfig& c, std::size_t category) {
  if (c.n_categories == 1) return c.tau_min_days;
  const double frac = static_cast<double>(category) / static_cast<double>(c.n_categories - 1);
  return c.tau_min_days * std::pow(c.tau_ratio, frac);
}

}  // namespace

std::string_view to_string(Effect e) { return kEffectNames[static_cast<int>(e)]; }

std::optional<Effect> parse_effect(std::string_view s) {
  for (int i = 0; i < 4; ++i) {
    if (s == kEffectNames[i]) return static_cast<Effect>(i);
  }
  return std::nullopt;
}

void SynthConfig::validate() const {
  if (n_users < 1) throw ConfigError("n_users must be >= 1");
  if (targets_per_user < 1) throw ConfigError("targets_per_user must be >= 1");
  if (n_categories < 1) throw ConfigError("n_categories must be >= 1");
  if (n_items < n_categories) throw ConfigError("n_items must be >= n_categories");
  if (min_len < 1 || max_len < min_len) throw ConfigError("need 1 <= min_len <= max_len");
  if (!(effect_strength >= 0.0) || !std::isfinite(effect_strength)) {
    throw ConfigError("effect_strength must be finite and >= 0");
  }
  if (!(negative_ratio > 0.0)) throw ConfigError("negative_ratio must be > 0");
  if (!(horizon_days > 0.0)) throw ConfigError("horizon_days must be > 0");
  if (!(tau_min_days > 0.0) || !(tau_ratio > 0.0)) throw ConfigError("tau settings must be > 0");
  if (effect == Effect::kMultiInterest && n_categories < 5) {
    throw ConfigError("multi_interest needs at least 5 categories");
  }
}

nlohmann::json synth_config_to_json(const SynthConfig& c) {
  return {{"seed", c.seed},
          {"n_users", c.n_users},
          {"targets_per_user", c.targets_per_user},
          {"n_items", c.n_items},
          {"n_categories", c.n_categories},
          {"effect", std::string(to_string(c.effect))},
          {"effect_strength", c.effect_strength},
          {"min_len", c.min_len},
          {"max_len", c.max_len},
          {"negative_ratio", c.negative_ratio},
          {"horizon_days", c.horizon_days},
          {"tau_min_days", c.tau_min_days},
          {"tau_ratio", c.tau_ratio}};
}

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("synthetic config must be an object");
  SynthConfig c;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "n_users") c.n_users = v.get<std::size_t>();
      else if (key == "targets_per_user") c.targets_per_user = v.get<std::size_t>();
      else if (key == "n_items") c.n_items = v.get<std::size_t>();
      else if (key == "n_categories") c.n_categories = v.get<std::size_t>();
      else if (key == "effect") {
        auto e = parse_effect(v.get<std::string>());
        if (!e) throw ConfigError("unknown effect '" + v.get<std::string>() + "'");
        c.effect = *e;
      } else if (key == "effect_strength") c.effect_strength = v.get<double>();
      else if (key == "min_len") c.min_len = v.get<std::size_t>();
      else if (key == "max_len") c.max_len = v.get<std::size_t>();
      else if (key == "negative_ratio") c.negative_ratio = v.get<double>();
      else if (key == "horizon_days") c.horizon_days = v.get<double>();
      else if (key == "tau_min_days") c.tau_min_days = v.get<double>();
      else if (key == "tau_ratio") c.tau_ratio = v.get<double>();
      else throw ConfigError("unknown synthetic config key '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("bad value for synthetic config key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

namespace {

// The planted score of a (user, target) pair before centering.
double planted_signal(const nlohmann::json& m, const std::string& effect, const Trajectory& user,
                      const TargetAd& target, std::size_t tc) {
  if (effect == "category_decay") {
    // Saturating presence of recent same-category behaviors.
    const double tau = m.at("tau_days").at(tc).get<double>() * kSecondsPerDay;
    double mass = 0.0;
    for (const BehaviorEvent& e : user.events) {
      if (e.side.cat_l1 == target.side.cat_l1) {
        mass += std::exp(-static_cast<double>(target.timestamp - e.timestamp) / tau);
      }
    }
    return 4.0 * (1.0 - std::exp(-mass));
  }
  if (effect == "noisy_fields") {
    double sum = 0.0;
    std::size_t matched = 0;
    for (const BehaviorEvent& e : user.events) {
      if (e.side.cat_l1 == target.side.cat_l1) {
        sum += engagement(e);
        ++matched;
      }
    }
    return matched ? 2.0 * sum / static_cast<double>(matched) : 0.0;
  }
  if (effect == "high_order") {
    const std::size_t linked =
        m.at("links").at(tc).at(scenario_index(target.scenario)).get<std::size_t>();
    double s = 0.0;
    for (const BehaviorEvent& e : user.events) {
      if (e.side.cat_l1 == target.side.cat_l1 && scenario_index(e.action_scenario) == linked) {
        s += engagement(e);
      }
    }
    return s;
  }
  throw DataError("unknown effect '" + effect + "' in manifest");
}

}  // namespace

double planted_probability(const nlohmann::json& m, const Trajectory& user, const TargetAd& target) {
  const std::string effect = m.at("config").at("effect").get<std::string>();
  const double strength = m.at("config").at("effect_strength").get<double>();
  const double bias = m.at("bias").get<double>();
  const std::size_t tc = category_index(target.side.cat_l1);

  if (effect == "multi_interest") {
    const auto interests = m.at("interests").at(user.user_id).get<std::vector<std::size_t>>();
    const double w = std::min(strength, 1.0);
    const double cats = m.at("config").at("n_categories").get<double>();
    const double k = static_cast<double>(interests.size());
    const bool in = std::find(interests.begin(), interests.end(), tc) != interests.end();
    const double like_pos = w * (in ? 1.0 / k : 0.0) + (1.0 - w) / cats;
    const double like_neg = w * (in ? 0.0 : 1.0 / (cats - k)) + (1.0 - w) / cats;
    const double prior = sigmoid(bias);
    return prior * like_pos / (prior * like_pos + (1.0 - prior) * like_neg);
  }
  const double center = m.at("centers").at(tc).get<double>();
  return sigmoid(strength * (planted_signal(m, effect, user, target, tc) - center) + bias);
}

Dataset generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t C = cfg.n_categories;
  const double bias = -std::log(cfg.negative_ratio);
  const std::int64_t horizon = static_cast<std::int64_t>(cfg.horizon_days * kSecondsPerDay);
  const std::string effect(to_string(cfg.effect));
  Rng rng(derive_seed(cfg.seed, "synthetic"));

  Dataset data;
  nlohmann::json& m = data.manifest;
  m["config"] = synth_config_to_json(cfg);
  m["bias"] = bias;

  std::vector<std::vector<std::size_t>> items_of(C);
  for (std::size_t j = 0; j < cfg.n_items; ++j) items_of[j % C].push_back(j);

  if (cfg.effect == Effect::kCategoryDecay) {
    std::vector<double> taus;
    for (std::size_t c = 0; c < C; ++c) taus.push_back(tau_days(cfg, c));
    m["tau_days"] = taus;
  }
  if (cfg.effect == Effect::kHighOrder) {
    std::vector<std::vector<std::size_t>> links(C, std::vector<std::size_t>(kNumAdScenarios));
    for (auto& row : links) {
      for (auto& v : row) v = rng.below(kNumAdScenarios);
    }
    m["links"] = links;
  }
  if (cfg.effect == Effect::kNoisyFields) m["distractor_field"] = "creative_fp";
  if (cfg.effect == Effect::kMultiInterest) m["interests"] = nlohmann::json::object();

  const std::size_t fp_values = cfg.max_len / 2 + 1;
  auto make_item = [&](std::size_t c) { return items_of[c][rng.below(items_of[c].size())]; };

  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    Trajectory traj;
    traj.user_id = user_name(u);
    const std::int64_t now = kBaseTime + static_cast<std::int64_t>(u) * 3600;

    std::vector<std::size_t> interests;
    if (cfg.effect == Effect::kMultiInterest) {
      std::vector<std::size_t> all(C);
      for (std::size_t c = 0; c < C; ++c) all[c] = c;
      rng.shuffle(all);
      interests.assign(all.begin(), all.begin() + 2 + static_cast<std::ptrdiff_t>(rng.below(3)));
      std::sort(interests.begin(), interests.end());
      m["interests"][traj.user_id] = interests;
    }
    std::vector<double> engage_rate(C);
    for (double& r : engage_rate) r = rng.uniform(0.1, 0.9);

    const std::size_t len = static_cast<std::size_t>(
        rng.range(static_cast<std::int64_t>(cfg.min_len), static_cast<std::int64_t>(cfg.max_len)));
    std::vector<std::int64_t> ages;
    for (std::size_t i = 0; i < len; ++i) ages.push_back(rng.range(60, horizon));
    std::sort(ages.begin(), ages.end(), std::greater<>());  // oldest first
    for (std::size_t i = 0; i < len; ++i) {
      std::size_t c;
      if (cfg.effect == Effect::kMultiInterest && rng.bernoulli(0.9)) {
        c = interests[rng.below(interests.size())];
      } else {
        c = rng.below(C);
      }
      BehaviorEvent e;
      e.user_id = traj.user_id;
      e.item_id = "i" + std::to_string(make_item(c));
      e.timestamp = now - ages[i];
      e.action_type = rng.bernoulli(engage_rate[c])
                          ? (rng.bernoulli(0.2) ? ActionType::kConversion : ActionType::kClick)
                          : ActionType::kImpression;
      e.action_scenario = kAdScenarios[rng.below(kNumAdScenarios)];
      e.action_domain = ActionDomain::kAd;
      e.side.cat_l1 = category_name(c);
      const std::size_t rank = len - 1 - i;  // 0 = most recent
      e.side.creative_fp = "fp" + std::to_string(rng.bernoulli(0.75) ? rank / 2 : rng.below(fp_values));
      traj.events.push_back(std::move(e));
    }

    for (std::size_t t = 0; t < cfg.targets_per_user; ++t) {
      TargetAd target;
      target.timestamp = now;
      target.scenario = kAdScenarios[rng.below(kNumAdScenarios)];
      Sample s;
      s.user = u;
      std::size_t c;
      if (cfg.effect == Effect::kMultiInterest) {
        s.label = rng.bernoulli(sigmoid(bias)) ? 1.0 : 0.0;
        if (rng.bernoulli(std::min(cfg.effect_strength, 1.0))) {
          std::vector<std::size_t> pool;
          for (std::size_t k = 0; k < C; ++k) {
            const bool in = std::binary_search(interests.begin(), interests.end(), k);
            if (in == (s.label > 0.5)) pool.push_back(k);
          }
          c = pool[rng.below(pool.size())];
        } else {
          c = rng.below(C);
        }
      } else {
        c = rng.below(C);
        target.side.creative_fp = "fp" + std::to_string(rng.below(fp_values));
      }
      target.side.cat_l1 = category_name(c);
      target.item_id = "i" + std::to_string(make_item(c));
      s.target = std::move(target);
      data.samples.push_back(std::move(s));
    }
    data.users.push_back(std::move(traj));
  }

  if (cfg.effect != Effect::kMultiInterest) {
    // Center each category's signal on its mean so the positive rate follows
    // the bias alone, then draw labels from a separate stream.
    std::vector<double> sum(C, 0.0), count(C, 0.0), signal;
    for (const Sample& s : data.samples) {
      const std::size_t tc = category_index(s.target.side.cat_l1);
      signal.push_back(planted_signal(m, effect, data.users[s.user], s.target, tc));
      sum[tc] += signal.back();
      count[tc] += 1.0;
    }
    std::vector<double> centers(C);
    for (std::size_t c = 0; c < C; ++c) centers[c] = count[c] > 0 ? sum[c] / count[c] : 0.0;
    m["centers"] = centers;
    Rng label_rng(derive_seed(cfg.seed, "labels"));
    for (Sample& s : data.samples) {
      s.label = label_rng.bernoulli(planted_probability(m, data.users[s.user], s.target)) ? 1.0 : 0.0;
    }
  }

  std::vector<double> labels, truth;
  for (const Sample& s : data.samples) {
    labels.push_back(s.label);
    truth.push_back(planted_probability(m, data.users[s.user], s.target));
  }
  m["samples"] = data.samples.size();
  m["positive_rate"] = summarize(labels).mean;
  const auto positives = std::count(labels.begin(), labels.end(), 1.0);
  const bool both = positives > 0 && positives < static_cast<std::ptrdiff_t>(labels.size());
  m["bayes_auc"] = both ? nlohmann::json(auc(labels, truth)) : nlohmann::json(nullptr);
  return data;
}

}  // namespace longseq
