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

#include "longseq/cli/cli.h"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "longseq/core/error.h"
#include "longseq/harness/dataset.h"
#include "longseq/harness/synthetic.h"
#include "longseq/harness/trainer.h"
#include "longseq/models/checkpoint.h"
#include "longseq/store/store.h"
#include "longseq/trajectory/io.h"
#include "longseq/trajectory/taxonomy.h"
#include "longseq/trajectory/trajectory.h"

namespace longseq::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

enum class Kind { kString, kUint, kDouble };

struct Flag {
  std::string name;  // --name
  std::string key;   // JSON pointer into the merged settings
  Kind kind;
  std::string help;
  bool required = false;
};

// A usage problem found after parsing: exit 2 like a bad flag.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error("usage", what) {}
};

json convert(const Flag& f, const std::string& text) {
  auto bad = [&](const char* what) {
    return UsageError("flag --" + f.name + " expects " + what + ", got '" + text + "'");
  };
  switch (f.kind) {
    case Kind::kString:
      return text;
    case Kind::kUint: {
      std::uint64_t v = 0;
      const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || p != text.data() + text.size()) throw bad("a non-negative integer");
      return v;
    }
    case Kind::kDouble: {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(text, &used);
      } catch (const std::exception&) {
        throw bad("a number");
      }
      if (used != text.size()) throw bad("a number");
      return v;
    }
  }
  return nullptr;
}

std::string top_key(const std::string& pointer) {
  const auto slash = pointer.find('/', 1);
  return pointer.substr(1, slash == std::string::npos ? std::string::npos : slash - 1);
}

json read_json_file(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(std::string("cannot open ") + what + " '" + path.string() + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DataError(std::string(what) + " '" + path.string() + "' is not valid JSON");
  return j;
}

struct Command {
  std::string name;
  std::string description;
  std::vector<Flag> flags;
  std::function<json(const json&)> body;

  // Filled during parsing.
  std::map<std::string, std::string> given{};
  std::string config_path{};
  CLI::App* app = nullptr;

  // Defaults < config file < flags.
  json settings() const {
    json merged = json::object();
    if (!config_path.empty()) {
      json file = read_json_file(config_path, "config file");
      if (!file.is_object()) throw UsageError("config file '" + config_path + "' must hold a JSON object");
      std::set<std::string> allowed;
      for (const Flag& f : flags) allowed.insert(top_key(f.key));
      for (const auto& [key, value] : file.items()) {
        if (!allowed.count(key)) {
          throw UsageError("unknown config key '" + key + "' in '" + config_path + "'");
        }
      }
      merged = std::move(file);
    }
    for (const Flag& f : flags) {
      auto it = given.find(f.name);
      if (it != given.end()) merged[json::json_pointer(f.key)] = convert(f, it->second);
    }
    for (const Flag& f : flags) {
      if (f.required && !merged.contains(json::json_pointer(f.key))) {
        throw UsageError("missing required setting --" + f.name + " (config key '" +
                         f.key.substr(1) + "')");
      }
    }
    return merged;
  }
};

template <typename T>
T get_or(const json& s, const std::string& pointer, T fallback) {
  const json::json_pointer p(pointer);
  if (!s.contains(p)) return fallback;
  try {
    return s.at(p).get<T>();
  } catch (const json::exception&) {
    throw UsageError("setting '" + pointer.substr(1) + "' has the wrong type");
  }
}

std::string path_setting(const json& s, const std::string& key) {
  return get_or<std::string>(s, "/" + key, "");
}

// Removes the CLI-only keys so the rest can go to a typed parser.
json without(json s, std::initializer_list<const char*> keys) {
  for (const char* k : keys) s.erase(k);
  return s;
}

std::string header_line(const std::string& command) {
  return json{{"created_at", creation_time()}, {"command", command}, {"tool", "longseq"}}.dump() + "\n";
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

// ---------------------------------------------------------------- gen-data

json cmd_gen_data(const json& s) {
  const fs::path out = path_setting(s, "out");
  const SynthConfig cfg = synth_config_from_json(without(s, {"out"}));
  const Dataset data = generate_synthetic(cfg);
  save_dataset(out, data);
  return {{"out", out.string()},
          {"users", data.users.size()},
          {"samples", data.samples.size()},
          {"positive_rate", data.manifest["positive_rate"]},
          {"bayes_auc", data.manifest["bayes_auc"]}};
}

// ------------------------------------------------------------------ ingest

json cmd_ingest(const json& s) {
  const fs::path input = path_setting(s, "input");
  const fs::path out = path_setting(s, "out");
  std::optional<CategoryTaxonomy> taxonomy;
  if (const std::string t = path_setting(s, "taxonomy"); !t.empty()) {
    taxonomy = taxonomy_from_json(read_json_file(t, "taxonomy"));
  }
  std::ifstream in(input, std::ios::binary);
  if (!in) throw DataError("cannot open events file '" + input.string() + "'");
  const IngestResult r = ingest_events(in, taxonomy ? &*taxonomy : nullptr);
  const Consolidated c = consolidate(r.events);

  std::ostringstream events, rejects;
  write_events(events, flatten(c));
  write_rejects(rejects, r.rejects);
  const json summary = {{"lines", r.lines},
                        {"accepted", r.events.size()},
                        {"rejected", r.rejects.size()},
                        {"duplicates", c.duplicates},
                        {"retained", c.retained},
                        {"users", c.users.size()},
                        {"domains", r.domain_counts()}};
  fs::create_directories(out);
  write_file_atomic(out / "events.jsonl", events.str());
  write_file_atomic(out / "rejects.jsonl", rejects.str());
  write_file_atomic(out / "summary.json", summary.dump(2) + "\n");
  return summary;
}

// --------------------------------------------------------------- build-spu

json cmd_build_spu(const json& s) {
  const fs::path products = path_setting(s, "products");
  const fs::path out = path_setting(s, "out");
  const CategoryTaxonomy taxonomy =
      taxonomy_from_json(read_json_file(path_setting(s, "taxonomy"), "taxonomy"));
  std::ifstream in(products, std::ios::binary);
  if (!in) throw DataError("cannot open products file '" + products.string() + "'");

  std::string line, body;
  std::size_t line_no = 0, built = 0, rejected = 0;
  std::set<std::string> spus;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec = {{"line_no", line_no}};
    const auto j = nlohmann::ordered_json::parse(line, nullptr, false);
    try {
      if (j.is_discarded()) throw DataError("malformed JSON");
      const ProductRecord p = product_from_json(j);
      const Spu spu = build_spu(p, taxonomy);
      rec["product_id"] = p.product_id;
      rec["spu_id"] = spu.id;
      rec["spu_key"] = spu.key;
      spus.insert(spu.id);
      ++built;
    } catch (const Error& e) {
      rec["reject"] = e.what();
      ++rejected;
    }
    body += rec.dump() + "\n";
  }
  ensure_parent(out);
  write_file_atomic(out, body);
  return {{"products", built}, {"rejected", rejected}, {"distinct_spus", spus.size()}};
}

// ------------------------------------------------------------------ search

SearchSettings search_settings(const json& s) {
  json wrapper = json::object();
  if (s.contains("search")) wrapper["search"] = s["search"];
  return run_config_from_json(wrapper).search;
}

json cmd_search(const json& s) {
  const Dataset data = load_dataset(path_setting(s, "data"));
  const fs::path out = path_setting(s, "out");
  const SearchSettings search = search_settings(s);
  search.validate();
  std::optional<LoadedCheckpoint> ckpt;
  if (const std::string c = path_setting(s, "checkpoint"); !c.empty()) ckpt = load_checkpoint(c);
  if (search.policy == SearchPolicy::kSoft && !ckpt) {
    throw UsageError("soft search needs --checkpoint");
  }
  const std::size_t limit = get_or<std::size_t>(s, "/limit", 0);
  const std::size_t n = limit == 0 ? data.samples.size() : std::min(limit, data.samples.size());

  std::string body;
  std::size_t selected = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& smp = data.samples[i];
    const Trajectory& traj = data.users[smp.user];
    const std::vector<Selection> sel =
        ckpt ? select_behaviors(search, traj, smp.target, *ckpt->model, ckpt->vocab)
             : select_behaviors(search, traj, smp.target);
    json picks = json::array();
    for (const Selection& x : sel) {
      const BehaviorEvent& e = traj.events[x.index];
      picks.push_back({{"index", x.index},
                       {"stage", std::string(to_string(x.stage))},
                       {"score", x.score},
                       {"item_id", e.item_id},
                       {"timestamp", e.timestamp}});
    }
    selected += sel.size();
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(selection_hash(sel)));
    body += json{{"sample", i}, {"user_id", traj.user_id}, {"selected", picks}, {"hash", hash}}.dump() + "\n";
  }
  ensure_parent(out);
  write_file_atomic(out, body);
  return {{"samples", n}, {"policy", std::string(to_string(search.policy))}, {"selected", selected}};
}

// ------------------------------------------------------------------- train

json cmd_train(const json& s) {
  const Dataset data = load_dataset(path_setting(s, "data"));
  const fs::path out = path_setting(s, "out");
  const RunConfig run = run_config_from_json(without(s, {"data", "out"}));
  const TrainResult result = train(run, data);

  std::string metrics = header_line("train");
  for (const EpochMetrics& m : result.history) metrics += epoch_metrics_to_json(m).dump() + "\n";
  json final_record = {{"final", eval_report_to_json(result.final_eval)},
                       {"diverged", result.diverged}};
  if (result.diverged) final_record["divergence"] = result.divergence;
  metrics += final_record.dump() + "\n";

  fs::create_directories(out);
  save_checkpoint(out, *result.model, result.vocab);
  write_file_atomic(out / "run.json", run_config_to_json(run).dump(2) + "\n");
  write_file_atomic(out / "metrics.jsonl", metrics);
  // The checkpoint above holds the last finite parameters; the run still fails.
  if (result.diverged) throw NumericError("training diverged: " + result.divergence);
  const EpochMetrics& last = result.history.back();
  return {{"out", out.string()},
          {"epochs", last.epoch},
          {"train_loss", last.train_loss},
          {"eval_auc", result.final_eval.auc ? json(*result.final_eval.auc) : json(nullptr)},
          {"eval_logloss", result.final_eval.logloss},
          {"diverged", result.diverged}};
}

// -------------------------------------------------------------------- eval

json cmd_eval(const json& s) {
  const fs::path ckpt_dir = path_setting(s, "checkpoint");
  const Dataset data = load_dataset(path_setting(s, "data"));
  const fs::path out = path_setting(s, "out");
  const std::string split = get_or<std::string>(s, "/split", "eval");
  if (split != "eval" && split != "all") throw UsageError("split must be 'eval' or 'all', got '" + split + "'");

  const LoadedCheckpoint ckpt = load_checkpoint(ckpt_dir);
  const RunConfig run = run_config_from_json(read_json_file(ckpt_dir / "run.json", "run config"));
  std::vector<std::size_t> ids;
  if (split == "all") {
    for (std::size_t i = 0; i < data.samples.size(); ++i) ids.push_back(i);
  } else {
    ids = split_by_user(data, run.eval_fraction, run.seed).eval;
  }
  if (ids.empty()) throw DataError("no samples to evaluate");
  const EvalReport report = evaluate(*ckpt.model, ckpt.vocab, data, ids, run.search);
  json record = eval_report_to_json(report);
  record["split"] = split;
  ensure_parent(out);
  write_file_atomic(out, header_line("eval") + record.dump() + "\n");
  return {{"samples", report.samples},
          {"auc", report.auc ? json(*report.auc) : json(nullptr)},
          {"logloss", report.logloss}};
}

// ---------------------------------------------------------- simulate-store

json stats_to_json(const ExchangeStats& s) {
  return {{"swapped_in", s.swapped_in_keys}, {"swapped_out", s.swapped_out_keys},
          {"bytes_in", s.bytes_in},          {"bytes_out", s.bytes_out},
          {"hits", s.hits},                  {"misses", s.misses},
          {"baseline_bytes", s.full_swap_baseline_bytes}};
}

BatchTrace read_trace(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open trace '" + path.string() + "'");
  BatchTrace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
      throw DataError("trace line " + std::to_string(line_no) + " is not a JSON array of keys");
    }
    std::vector<std::string> batch;
    for (const json& k : j) {
      if (!k.is_string()) throw DataError("trace line " + std::to_string(line_no) + " has a non-string key");
      batch.push_back(k.get<std::string>());
    }
    trace.push_back(std::move(batch));
  }
  return trace;
}

json cmd_simulate_store(const json& s) {
  const fs::path out = path_setting(s, "out");
  StoreConfig cfg;
  cfg.capacity = get_or<std::size_t>(s, "/capacity", cfg.capacity);
  cfg.row_bytes = get_or<std::size_t>(s, "/row_bytes", cfg.row_bytes);
  cfg.dim = get_or<std::size_t>(s, "/dim", cfg.dim);
  cfg.pin_budget = get_or<std::size_t>(s, "/pin_budget", cfg.pin_budget);
  cfg.validate();
  SimulationOptions opt;
  opt.pin_threshold = get_or<std::uint64_t>(s, "/pin_threshold", 0);
  opt.warmup = get_or<std::size_t>(s, "/warmup", opt.warmup);

  BatchTrace trace;
  if (const std::string t = path_setting(s, "trace"); !t.empty()) {
    trace = read_trace(t);
  } else {
    trace = overlap_trace(get_or<std::size_t>(s, "/batches", 200), get_or<std::size_t>(s, "/batch_size", 64),
                          get_or<double>(s, "/overlap", 0.75), get_or<std::uint64_t>(s, "/seed", 1));
  }
  const SimulationReport r = simulate_store(cfg, trace, opt);

  std::string body;
  for (std::size_t b = 0; b < r.per_batch.size(); ++b) {
    json rec = stats_to_json(r.per_batch[b]);
    rec["batch"] = b;
    body += rec.dump() + "\n";
  }
  const json summary = {{"batches", trace.size()},
                        {"warmup", opt.warmup},
                        {"total", stats_to_json(r.total)},
                        {"savings", incremental_savings(r.total)},
                        {"savings_after_warmup", incremental_savings(r.after_warmup)},
                        {"pinned", r.pinned.size()}};
  body += json{{"summary", summary}}.dump() + "\n";
  ensure_parent(out);
  write_file_atomic(out, body);
  return summary;
}

// ----------------------------------------------------------------- wiring

std::vector<Command> commands() {
  const Flag seed{"seed", "/seed", Kind::kUint, "global seed"};
  std::vector<Command> c;
  c.push_back({"gen-data",
               "Generate a synthetic dataset with a planted effect",
               {{"out", "/out", Kind::kString, "output dataset directory", true},
                seed,
                {"effect", "/effect", Kind::kString,
                 "category_decay, noisy_fields, high_order or multi_interest"},
                {"users", "/n_users", Kind::kUint, "number of users"},
                {"targets-per-user", "/targets_per_user", Kind::kUint, "samples per user"},
                {"items", "/n_items", Kind::kUint, "number of items"},
                {"categories", "/n_categories", Kind::kUint, "number of categories"},
                {"strength", "/effect_strength", Kind::kDouble, "effect strength, 0 for none"},
                {"min-len", "/min_len", Kind::kUint, "shortest trajectory"},
                {"max-len", "/max_len", Kind::kUint, "longest trajectory"},
                {"negative-ratio", "/negative_ratio", Kind::kDouble, "negatives per positive"},
                {"horizon-days", "/horizon_days", Kind::kDouble, "history window in days"},
                {"tau-min-days", "/tau_min_days", Kind::kDouble, "shortest decay constant"},
                {"tau-ratio", "/tau_ratio", Kind::kDouble, "longest over shortest decay constant"}},
               cmd_gen_data});
  c.push_back({"ingest",
               "Validate raw events and consolidate them into trajectories",
               {{"input", "/input", Kind::kString, "events file, one JSON object per line", true},
                {"out", "/out", Kind::kString, "output directory", true},
                {"taxonomy", "/taxonomy", Kind::kString, "taxonomy JSON for category path checks"}},
               cmd_ingest});
  c.push_back({"build-spu",
               "Map product records to standard product units",
               {{"products", "/products", Kind::kString, "product records, one JSON object per line", true},
                {"taxonomy", "/taxonomy", Kind::kString, "taxonomy JSON", true},
                {"out", "/out", Kind::kString, "output file", true}},
               cmd_build_spu});
  c.push_back({"search",
               "Run the behavior search for every sample of a dataset",
               {{"data", "/data", Kind::kString, "dataset directory", true},
                {"out", "/out", Kind::kString, "output file", true},
                {"checkpoint", "/checkpoint", Kind::kString, "trained model, required for soft search"},
                {"policy", "/search/policy", Kind::kString, "latest, hard, soft or stratified"},
                {"k", "/search/k", Kind::kUint, "behaviors to select"},
                {"level", "/search/stratify_level", Kind::kUint, "category level for stratified sampling"},
                {"limit", "/limit", Kind::kUint, "first N samples only, 0 for all"}},
               cmd_search});
  c.push_back({"train",
               "Train a model on a dataset and write a checkpoint",
               {{"data", "/data", Kind::kString, "dataset directory", true},
                {"out", "/out", Kind::kString, "checkpoint directory", true},
                seed,
                {"model", "/model/kind", Kind::kString, "tin, dare, dsi, stin or sasrec"},
                {"dim", "/model/dim", Kind::kUint, "embedding width"},
                {"epochs", "/epochs", Kind::kUint, "training epochs"},
                {"batch-size", "/batch_size", Kind::kUint, "samples per update"},
                {"lr", "/optimizer/lr", Kind::kDouble, "Adam learning rate"},
                {"eval-fraction", "/eval_fraction", Kind::kDouble, "share of users held out"},
                {"policy", "/search/policy", Kind::kString, "latest, hard, soft or stratified"},
                {"k", "/search/k", Kind::kUint, "behaviors to select"}},
               cmd_train});
  c.push_back({"eval",
               "Evaluate a checkpoint on a dataset",
               {{"checkpoint", "/checkpoint", Kind::kString, "checkpoint directory", true},
                {"data", "/data", Kind::kString, "dataset directory", true},
                {"out", "/out", Kind::kString, "metrics file", true},
                {"split", "/split", Kind::kString, "eval (held-out users) or all"}},
               cmd_eval});
  c.push_back({"simulate-store",
               "Replay a batch trace through the two-tier embedding store",
               {{"out", "/out", Kind::kString, "per-batch statistics file", true},
                seed,
                {"trace", "/trace", Kind::kString, "trace file, one JSON array of keys per line"},
                {"batches", "/batches", Kind::kUint, "generated trace length"},
                {"batch-size", "/batch_size", Kind::kUint, "keys per generated batch"},
                {"overlap", "/overlap", Kind::kDouble, "share of keys kept from the previous batch"},
                {"capacity", "/capacity", Kind::kUint, "device-resident rows"},
                {"row-bytes", "/row_bytes", Kind::kUint, "accounted bytes per row"},
                {"dim", "/dim", Kind::kUint, "values per row"},
                {"pin-threshold", "/pin_threshold", Kind::kUint, "pin keys seen this often, 0 disables"},
                {"pin-budget", "/pin_budget", Kind::kUint, "most keys to pin"},
                {"warmup", "/warmup", Kind::kUint, "batches left out of the after-warmup savings"}},
               cmd_simulate_store});
  return c;
}

std::string error_record(const std::string& kind, const std::string& message, const std::string& command) {
  json j = {{"error", kind}, {"message", message}};
  if (!command.empty()) j["command"] = command;
  return j.dump();
}

}  // namespace

std::string creation_time() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end != epoch && *end == '\0') now = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Long-sequence recommendation toolkit", "longseq"};
  app.require_subcommand(1);
  std::vector<Command> cmds = commands();
  for (Command& cmd : cmds) {
    cmd.app = app.add_subcommand(cmd.name, cmd.description);
    cmd.app->add_option("--config", cmd.config_path, "JSON settings file; flags take precedence")
        ->check(CLI::ExistingFile);
    for (const Flag& f : cmd.flags) {
      std::string* slot = &cmd.given[f.name];
      cmd.app->add_option("--" + f.name, *slot, f.help + (f.required ? " (required)" : ""))
          ->type_name(f.kind == Kind::kString ? "TEXT" : f.kind == Kind::kUint ? "UINT" : "FLOAT");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  Command* active = nullptr;
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string name;
    for (Command& cmd : cmds) {
      if (cmd.app->parsed()) name = cmd.name;
    }
    err << error_record("usage", e.what(), name) << "\n" << app.help();
    return kExitUsage;
  }
  for (Command& cmd : cmds) {
    if (!cmd.app->parsed()) continue;
    active = &cmd;
    for (const Flag& f : cmd.flags) {
      if (cmd.app->get_option("--" + f.name)->count() == 0) cmd.given.erase(f.name);
    }
  }

  try {
    const json summary = active->body(active->settings());
    out << summary.dump() << "\n";
    return kExitOk;
  } catch (const UsageError& e) {
    err << error_record(e.kind(), e.what(), active->name) << "\n" << active->app->help();
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << error_record(e.kind(), e.what(), active->name) << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << error_record(e.kind(), e.what(), active->name) << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << error_record("internal", e.what(), active->name) << "\n";
    return kExitRuntime;
  }
}

}  // namespace longseq::cli
