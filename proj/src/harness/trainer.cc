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

#include "longseq/harness/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "longseq/core/error.h"
#include "longseq/core/ops.h"
#include "longseq/core/random.h"
#include "longseq/harness/metrics.h"
#include "longseq/models/sample.h"
#include "longseq/trajectory/taxonomy.h"

namespace longseq {
namespace {

constexpr const char* kPolicyNames[] = {"latest", "hard", "soft", "stratified"};

template <typename T>
T json_get(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("bad value for config key '" + key + "'");
  }
}

std::vector<std::string> vocab_fields(const ModelConfig& m) {
  std::vector<std::string> f = m.fields;
  if (std::find(f.begin(), f.end(), m.category_field) == f.end()) f.push_back(m.category_field);
  return f;
}

struct Encoded {
  EncodedSample sample;
  std::uint64_t hash = 0;
};

Encoded encode(const SearchSettings& search, const Dataset& data, std::size_t idx, const Model& model,
               const VocabMap& vocab) {
  const Sample& s = data.samples[idx];
  const Trajectory& traj = data.users.at(s.user);
  const std::vector<Selection> sel = select_behaviors(search, traj, s.target, model, vocab);
  const ModelConfig& c = model.config();
  return {encode_sample(selected_events(traj, sel), s.target, vocab, c.fields, c.category_field, s.label),
          selection_hash(sel)};
}

double sample_loss(const Model& model, const EncodedSample& s, double weight, bool backprop) {
  Tape tape;
  ForwardResult r = model.forward(tape, s);
  Var loss = bce_loss(r.probability, {s.label});
  const double value = loss.value().at(0, 0);
  if (backprop) tape.backward(scale(loss, weight));
  return value;
}

}  // namespace

std::string_view to_string(SearchPolicy p) { return kPolicyNames[static_cast<int>(p)]; }

std::optional<SearchPolicy> parse_search_policy(std::string_view s) {
  for (int i = 0; i < 4; ++i) {
    if (s == kPolicyNames[i]) return static_cast<SearchPolicy>(i);
  }
  return std::nullopt;
}

void SearchSettings::validate() const {
  if (k < 1) throw ConfigError("search k must be >= 1");
  if (policy == SearchPolicy::kHard) {
    SearchConfig h = hard;
    h.k = k;
    h.validate();
  }
  if (stratify_level < 1 || stratify_level > 3) throw ConfigError("stratify_level must be 1, 2 or 3");
}

void RunConfig::validate() const {
  model.validate();
  search.validate();
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(eval_fraction >= 0.0 && eval_fraction < 1.0)) throw ConfigError("eval_fraction must be in [0, 1)");
  if (!(optimizer.lr >= 0.0) || !std::isfinite(optimizer.lr)) throw ConfigError("lr must be finite and >= 0");
  if (search.policy == SearchPolicy::kSoft &&
      (model.kind == ModelKind::kSasrec || model.kind == ModelKind::kDsi)) {
    throw ConfigError("soft search needs a tin, dare or stin model");
  }
}

nlohmann::json run_config_to_json(const RunConfig& c) {
  nlohmann::json search = {{"policy", std::string(to_string(c.search.policy))},
                           {"k", c.search.k},
                           {"level_order", c.search.hard.level_order},
                           {"fill_latest", c.search.hard.fill_latest},
                           {"use_attention_space", c.search.use_attention_space},
                           {"stratify_level", c.search.stratify_level}};
  search["union_action_types"] = nlohmann::json::array();
  for (ActionType a : c.search.hard.union_action_types) search["union_action_types"].push_back(to_string(a));
  search["union_scenarios"] = nlohmann::json::array();
  for (ActionScenario s : c.search.hard.union_scenarios) search["union_scenarios"].push_back(to_string(s));
  return {{"model", model_config_to_json(c.model)},
          {"search", search},
          {"optimizer",
           {{"lr", c.optimizer.lr},
            {"beta1", c.optimizer.beta1},
            {"beta2", c.optimizer.beta2},
            {"eps", c.optimizer.eps}}},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"eval_fraction", c.eval_fraction},
          {"seed", c.seed}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("run config must be an object");
  RunConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "model") {
      c.model = model_config_from_json(v);
    } else if (key == "search") {
      if (!v.is_object()) throw ConfigError("config key 'search' must be an object");
      for (const auto& [sk, sv] : v.items()) {
        const std::string name = "search." + sk;
        if (sk == "policy") {
          auto p = parse_search_policy(json_get<std::string>(sv, name));
          if (!p) throw ConfigError("unknown search policy '" + sv.dump() + "'");
          c.search.policy = *p;
        } else if (sk == "k") {
          c.search.k = json_get<std::size_t>(sv, name);
        } else if (sk == "level_order") {
          c.search.hard.level_order = json_get<std::vector<int>>(sv, name);
        } else if (sk == "fill_latest") {
          c.search.hard.fill_latest = json_get<bool>(sv, name);
        } else if (sk == "use_attention_space") {
          c.search.use_attention_space = json_get<bool>(sv, name);
        } else if (sk == "stratify_level") {
          c.search.stratify_level = json_get<int>(sv, name);
        } else if (sk == "union_action_types") {
          c.search.hard.union_action_types.clear();
          for (const auto& s : json_get<std::vector<std::string>>(sv, name)) {
            auto a = parse_action_type(s);
            if (!a) throw ConfigError("unknown action_type '" + s + "' in " + name);
            c.search.hard.union_action_types.push_back(*a);
          }
        } else if (sk == "union_scenarios") {
          c.search.hard.union_scenarios.clear();
          for (const auto& s : json_get<std::vector<std::string>>(sv, name)) {
            auto a = parse_action_scenario(s);
            if (!a) throw ConfigError("unknown action_scenario '" + s + "' in " + name);
            c.search.hard.union_scenarios.push_back(*a);
          }
        } else {
          throw ConfigError("unknown config key '" + name + "'");
        }
      }
    } else if (key == "optimizer") {
      if (!v.is_object()) throw ConfigError("config key 'optimizer' must be an object");
      for (const auto& [ok, ov] : v.items()) {
        const std::string name = "optimizer." + ok;
        if (ok == "lr") c.optimizer.lr = json_get<double>(ov, name);
        else if (ok == "beta1") c.optimizer.beta1 = json_get<double>(ov, name);
        else if (ok == "beta2") c.optimizer.beta2 = json_get<double>(ov, name);
        else if (ok == "eps") c.optimizer.eps = json_get<double>(ov, name);
        else throw ConfigError("unknown config key '" + name + "'");
      }
    } else if (key == "epochs") {
      c.epochs = json_get<std::size_t>(v, key);
    } else if (key == "batch_size") {
      c.batch_size = json_get<std::size_t>(v, key);
    } else if (key == "eval_fraction") {
      c.eval_fraction = json_get<double>(v, key);
    } else if (key == "seed") {
      c.seed = json_get<std::uint64_t>(v, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

Split split_by_user(const Dataset& data, double eval_fraction, std::uint64_t seed) {
  std::vector<std::size_t> users(data.users.size());
  std::iota(users.begin(), users.end(), 0);
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(users);
  const std::size_t n_eval = static_cast<std::size_t>(std::llround(eval_fraction * users.size()));
  std::vector<std::uint8_t> is_eval(users.size(), 0);
  for (std::size_t i = 0; i < n_eval; ++i) is_eval[users[i]] = 1;
  Split s;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    (is_eval[data.samples[i].user] ? s.eval : s.train).push_back(i);
  }
  return s;
}

VocabMap build_run_vocab(const ModelConfig& model, const Dataset& data,
                         const std::vector<std::size_t>& samples) {
  VocabMap vocab(vocab_fields(model));
  std::vector<std::uint8_t> seen(data.users.size(), 0);
  for (std::size_t i : samples) {
    const Sample& s = data.samples[i];
    if (!seen[s.user]) {
      seen[s.user] = 1;
      for (const BehaviorEvent& e : data.users[s.user].events) {
        for (const std::string& f : vocab.fields()) vocab.add(f, field_value(e, f));
      }
    }
    for (const std::string& f : vocab.fields()) {
      if (target_has_field(f)) vocab.add(f, field_value(s.target, f));
    }
  }
  vocab.freeze();
  return vocab;
}

std::vector<Selection> select_behaviors(const SearchSettings& search, const Trajectory& traj,
                                        const TargetAd& target) {
  switch (search.policy) {
    case SearchPolicy::kLatest: {
      std::vector<std::size_t> order = recency_order(traj.events);
      order.resize(std::min(order.size(), search.k));
      std::vector<Selection> out;
      for (std::size_t i : order) out.push_back({i, SearchStage::kLatest, 0.0});
      return out;
    }
    case SearchPolicy::kHard: {
      SearchConfig h = search.hard;
      h.k = search.k;
      return hard_search(traj, target, h);
    }
    case SearchPolicy::kSoft:
      throw ConfigError("soft search needs a trained model");
    case SearchPolicy::kStratified:
      return stratified_sample(traj, search.k, search.stratify_level);
  }
  return {};
}

std::vector<Selection> select_behaviors(const SearchSettings& search, const Trajectory& traj,
                                        const TargetAd& target, const Model& model,
                                        const VocabMap& vocab) {
  if (search.policy != SearchPolicy::kSoft) return select_behaviors(search, traj, target);
  return soft_search(traj, target, soft_search_context(model, vocab),
                     {search.k, search.use_attention_space});
}

EvalReport evaluate(const Model& model, const VocabMap& vocab, const Dataset& data,
                    const std::vector<std::size_t>& samples, const SearchSettings& search) {
  const ModelConfig& c = model.config();
  for (const std::string& f : vocab_fields(c)) {
    if (!vocab.has_field(f)) throw DataError("vocabulary mismatch: no field '" + f + "'");
    const auto pos = std::find(c.fields.begin(), c.fields.end(), f);
    if (pos != c.fields.end() &&
        vocab.size(f) != model.vocab_sizes()[static_cast<std::size_t>(pos - c.fields.begin())]) {
      throw DataError("vocabulary mismatch: field '" + f + "' has " + std::to_string(vocab.size(f)) +
                      " ids but the model expects " +
                      std::to_string(model.vocab_sizes()[static_cast<std::size_t>(pos - c.fields.begin())]));
    }
  }
  EvalReport r;
  r.samples = samples.size();
  std::vector<double> labels;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_cat;
  std::string digest;
  for (std::size_t i : samples) {
    Encoded e = encode(search, data, i, model, vocab);
    const double p = model.predict(e.sample);
    const Sample& s = data.samples[i];
    labels.push_back(s.label);
    r.probabilities.push_back(p);
    r.selection_hashes.push_back(e.hash);
    digest += std::to_string(e.hash) + ",";
    auto& cat = by_cat[field_value(s.target, c.category_field)];
    cat.first.push_back(s.label);
    cat.second.push_back(p);
  }
  r.selection_digest = fnv1a64(digest);
  r.logloss = logloss(labels, r.probabilities);
  const auto has_both = [](const std::vector<double>& l) {
    const auto pos = std::count(l.begin(), l.end(), 1.0);
    return pos > 0 && pos < static_cast<std::ptrdiff_t>(l.size());
  };
  if (has_both(labels)) r.auc = auc(labels, r.probabilities);
  for (auto& [cat, lp] : by_cat) {
    CategoryMetrics m;
    m.samples = lp.first.size();
    m.positives = static_cast<std::size_t>(std::count(lp.first.begin(), lp.first.end(), 1.0));
    if (has_both(lp.first)) m.auc = auc(lp.first, lp.second);
    r.per_category[cat] = m;
  }
  return r;
}

nlohmann::json eval_report_to_json(const EvalReport& r) {
  nlohmann::json j;
  j["samples"] = r.samples;
  j["auc"] = r.auc ? nlohmann::json(*r.auc) : nlohmann::json(nullptr);
  j["logloss"] = r.logloss;
  j["selection_digest"] = r.selection_digest;
  nlohmann::json cats = nlohmann::json::object();
  for (const auto& [cat, m] : r.per_category) {
    cats[cat] = {{"samples", m.samples},
                 {"positives", m.positives},
                 {"auc", m.auc ? nlohmann::json(*m.auc) : nlohmann::json(nullptr)}};
  }
  j["per_category"] = cats;
  return j;
}

nlohmann::json epoch_metrics_to_json(const EpochMetrics& m) {
  return {{"epoch", m.epoch},
          {"train_loss", m.train_loss},
          {"eval_auc", m.eval_auc ? nlohmann::json(*m.eval_auc) : nlohmann::json(nullptr)},
          {"eval_logloss", m.eval_logloss}};
}

TrainResult train(const RunConfig& run, const Dataset& data) {
  run.validate();
  if (data.samples.empty()) throw DataError("no samples to train on");
  TrainResult out;
  out.split = split_by_user(data, run.eval_fraction, run.seed);
  if (out.split.train.empty()) throw DataError("the split left no training samples");
  out.vocab = build_run_vocab(run.model, data, out.split.train);
  out.model = make_model(run.model, out.vocab, derive_seed(run.seed, "model"));
  Model& model = *out.model;
  const std::vector<std::size_t>& train_ids = out.split.train;

  std::vector<EncodedSample> encoded;
  auto encode_train = [&] {
    encoded.clear();
    for (std::size_t i : train_ids) encoded.push_back(encode(run.search, data, i, model, out.vocab).sample);
  };
  const bool soft = run.search.policy == SearchPolicy::kSoft;
  encode_train();

  auto eval_now = [&](std::size_t epoch, double train_loss) {
    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = train_loss;
    if (!out.split.eval.empty()) {
      EvalReport r = evaluate(model, out.vocab, data, out.split.eval, run.search);
      m.eval_auc = r.auc;
      m.eval_logloss = r.logloss;
    }
    out.history.push_back(m);
  };

  double initial = 0.0;
  for (const EncodedSample& s : encoded) initial += sample_loss(model, s, 0.0, false);
  eval_now(0, initial / static_cast<double>(encoded.size()));

  Adam adam(run.optimizer);
  const std::vector<Parameter*> params = model.params().all();
  for (std::size_t epoch = 1; epoch <= run.epochs; ++epoch) {
    if (soft && epoch > 1) encode_train();
    const std::vector<Tensor> last_good = model.params().snapshot();
    std::vector<std::size_t> order(encoded.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(run.seed, "epoch-" + std::to_string(epoch)));
    rng.shuffle(order);
    double total = 0.0;
    try {
      for (std::size_t start = 0; start < order.size(); start += run.batch_size) {
        const std::size_t end = std::min(order.size(), start + run.batch_size);
        model.params().zero_grad();
        const double w = 1.0 / static_cast<double>(end - start);
        for (std::size_t b = start; b < end; ++b) total += sample_loss(model, encoded[order[b]], w, true);
        adam.step(params);
      }
      if (!std::isfinite(total)) throw NumericError("training loss is not finite");
    } catch (const NumericError& e) {
      model.params().restore(last_good);
      out.diverged = true;
      out.divergence = "epoch " + std::to_string(epoch) + ": " + e.what();
      break;
    }
    eval_now(epoch, total / static_cast<double>(encoded.size()));
  }
  model.params().zero_grad();
  if (!out.split.eval.empty()) out.final_eval = evaluate(model, out.vocab, data, out.split.eval, run.search);
  return out;
}

}  // namespace longseq
