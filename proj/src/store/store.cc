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

#include "longseq/store/store.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "longseq/core/error.h"
#include "longseq/core/random.h"

namespace longseq {

ExchangeStats operator-(const ExchangeStats& a, const ExchangeStats& b) {
  return {a.swapped_in_keys - b.swapped_in_keys,
          a.swapped_out_keys - b.swapped_out_keys,
          a.bytes_in - b.bytes_in,
          a.bytes_out - b.bytes_out,
          a.hits - b.hits,
          a.misses - b.misses,
          a.full_swap_baseline_bytes - b.full_swap_baseline_bytes};
}

double incremental_savings(const ExchangeStats& s) {
  if (s.full_swap_baseline_bytes == 0) return 0.0;
  return 1.0 - static_cast<double>(s.bytes_in + s.bytes_out) /
                   static_cast<double>(s.full_swap_baseline_bytes);
}

void StoreConfig::validate() const {
  if (capacity < 1) throw ConfigError("store capacity must be >= 1");
  if (dim < 1) throw ConfigError("store row dim must be >= 1");
  if (pin_budget >= capacity) {
    throw ConfigError("pin budget " + std::to_string(pin_budget) + " must be below capacity " +
                      std::to_string(capacity));
  }
}

TwoTierStore::TwoTierStore(StoreConfig config) : config_(config) { config_.validate(); }

KeyCollection TwoTierStore::key_collect(const std::vector<std::string>& batch) {
  KeyCollection out;
  std::unordered_map<std::string, std::size_t> slot;
  for (const std::string& k : batch) {
    auto [it, fresh] = slot.emplace(k, out.keys.size());
    if (fresh) {
      out.keys.push_back(k);
      out.counts.push_back(0);
    }
    ++out.counts[it->second];
    ++freq_[k];
  }
  return out;
}

void TwoTierStore::touch(const std::string& key, Entry& e) {
  if (e.stamp != 0) by_stamp_.erase(e.stamp);
  e.stamp = ++clock_;
  by_stamp_.emplace(e.stamp, key);
}

PrefetchResult TwoTierStore::prefetch(const std::vector<std::string>& keys) {
  const std::unordered_set<std::string> batch(keys.begin(), keys.end());
  if (batch.size() != keys.size()) throw ContractError("prefetch keys must be unique");
  std::size_t pinned_elsewhere = 0;
  for (const std::string& p : pinned_) {
    if (device_.count(p) && !batch.count(p)) ++pinned_elsewhere;
  }
  if (keys.size() + pinned_elsewhere > config_.capacity) {
    throw CapacityError("batch of " + std::to_string(keys.size()) + " keys needs " +
                        std::to_string(keys.size() + pinned_elsewhere - config_.capacity) +
                        " more device rows (capacity " + std::to_string(config_.capacity) + ", " +
                        std::to_string(pinned_elsewhere) + " pinned elsewhere)");
  }

  PrefetchResult r;
  const ExchangeStats before = stats_;
  std::vector<std::string> missing;
  for (const std::string& k : keys) {
    if (device_.count(k)) {
      ++stats_.hits;
    } else {
      ++stats_.misses;
      missing.push_back(k);
    }
  }
  std::size_t room = config_.capacity - device_.size();
  if (missing.size() > room) {
    std::size_t need = missing.size() - room;
    for (auto it = by_stamp_.begin(); need > 0 && it != by_stamp_.end();) {
      const std::string& victim = it->second;
      if (pinned_.count(victim) || batch.count(victim)) {
        ++it;
        continue;
      }
      r.swapped_out.push_back(victim);
      auto node = device_.extract(victim);
      host_[victim] = std::move(node.mapped().row);
      it = by_stamp_.erase(it);
      --need;
    }
  }
  for (const std::string& k : missing) {
    Entry e;
    auto h = host_.find(k);
    if (h != host_.end()) {
      e.row = std::move(h->second);
      host_.erase(h);
    } else {
      e.row.assign(config_.dim, 0.0);
    }
    touch(k, device_[k] = std::move(e));
    r.swapped_in.push_back(k);
  }
  stats_.swapped_in_keys += r.swapped_in.size();
  stats_.swapped_out_keys += r.swapped_out.size();
  stats_.bytes_in += r.swapped_in.size() * config_.row_bytes;
  stats_.bytes_out += r.swapped_out.size() * config_.row_bytes;
  stats_.full_swap_baseline_bytes += keys.size() * config_.row_bytes * 2;
  ++prefetches_;
  r.delta = stats_ - before;
  return r;
}

std::vector<std::string> TwoTierStore::pin_high_freq(std::uint64_t threshold) {
  if (threshold < 1) throw ConfigError("pin threshold must be >= 1");
  std::vector<std::pair<std::uint64_t, std::string>> cand;
  for (const auto& [k, f] : freq_) {
    if (f >= threshold) cand.emplace_back(f, k);
  }
  std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  if (cand.size() > config_.pin_budget) cand.resize(config_.pin_budget);
  pinned_.clear();
  std::vector<std::string> out;
  for (auto& [f, k] : cand) {
    pinned_.insert(k);
    out.push_back(std::move(k));
  }
  return out;
}

void TwoTierStore::unpin_all() { pinned_.clear(); }

TwoTierStore::Entry& TwoTierStore::resident_entry(const std::string& key, const char* op) {
  auto it = device_.find(key);
  if (it == device_.end()) {
    throw ContractError(std::string(op) + " of key '" + key + "' that was not prefetched");
  }
  return it->second;
}

std::vector<TwoTierStore::Row> TwoTierStore::lookup(const std::vector<std::string>& keys) {
  for (const std::string& k : keys) resident_entry(k, "lookup");
  std::vector<Row> out;
  out.reserve(keys.size());
  for (const std::string& k : keys) {
    Entry& e = device_.at(k);
    touch(k, e);
    out.push_back(e.row);
  }
  return out;
}

void TwoTierStore::write_back(const std::vector<std::string>& keys, const std::vector<Row>& rows) {
  if (keys.size() != rows.size()) throw ContractError("write_back keys and rows differ in length");
  for (std::size_t i = 0; i < keys.size(); ++i) {
    resident_entry(keys[i], "write_back");
    if (rows[i].size() != config_.dim) throw ContractError("write_back row has the wrong width");
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    Entry& e = device_.at(keys[i]);
    e.row = rows[i];
    touch(keys[i], e);
  }
}

TwoTierStore::Row TwoTierStore::value(const std::string& key) const {
  if (auto d = device_.find(key); d != device_.end()) return d->second.row;
  if (auto h = host_.find(key); h != host_.end()) return h->second;
  return Row(config_.dim, 0.0);
}

std::set<std::string> TwoTierStore::resident_keys() const {
  std::set<std::string> out;
  for (const auto& [k, e] : device_) out.insert(k);
  return out;
}

std::vector<std::string> TwoTierStore::lru_order() const {
  std::vector<std::string> out;
  for (const auto& [stamp, k] : by_stamp_) out.push_back(k);
  return out;
}

std::uint64_t TwoTierStore::frequency(const std::string& key) const {
  auto it = freq_.find(key);
  return it == freq_.end() ? 0 : it->second;
}

BatchTrace overlap_trace(std::size_t batches, std::size_t batch_size, double overlap,
                         std::uint64_t seed) {
  if (!(overlap >= 0.0 && overlap <= 1.0)) throw ConfigError("overlap must be in [0, 1]");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  const auto kept = static_cast<std::size_t>(std::llround(overlap * static_cast<double>(batch_size)));
  Rng rng(derive_seed(seed, "trace"));
  BatchTrace trace;
  std::uint64_t next = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    std::vector<std::string> batch;
    if (b > 0) {
      std::vector<std::string> prev = trace.back();
      rng.shuffle(prev);
      batch.assign(prev.begin(), prev.begin() + static_cast<std::ptrdiff_t>(kept));
    }
    while (batch.size() < batch_size) batch.push_back("k" + std::to_string(next++));
    rng.shuffle(batch);
    trace.push_back(std::move(batch));
  }
  return trace;
}

SimulationReport simulate_store(const StoreConfig& config, const BatchTrace& trace,
                                const SimulationOptions& options) {
  TwoTierStore store(config);
  SimulationReport report;
  ExchangeStats at_warmup;
  for (std::size_t b = 0; b < trace.size(); ++b) {
    if (b == options.warmup) at_warmup = store.stats();
    const KeyCollection keys = store.key_collect(trace[b]);
    if (options.pin_threshold > 0 && config.pin_budget > 0) store.pin_high_freq(options.pin_threshold);
    const PrefetchResult r = store.prefetch(keys.keys);
    std::vector<TwoTierStore::Row> rows = store.lookup(keys.keys);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (double& v : rows[i]) v += static_cast<double>(keys.counts[i]);
    }
    store.write_back(keys.keys, rows);
    report.per_batch.push_back(r.delta);
  }
  report.total = store.stats();
  report.after_warmup = options.warmup < trace.size() ? store.stats() - at_warmup : ExchangeStats{};
  report.pinned.assign(store.pinned().begin(), store.pinned().end());
  return report;
}

}  // namespace longseq
