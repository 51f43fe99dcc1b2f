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
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace longseq {

struct ExchangeStats {
  std::uint64_t swapped_in_keys = 0;
  std::uint64_t swapped_out_keys = 0;
  std::uint64_t bytes_in = 0;
  std::uint64_t bytes_out = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t full_swap_baseline_bytes = 0;

  friend bool operator==(const ExchangeStats&, const ExchangeStats&) = default;
};

ExchangeStats operator-(const ExchangeStats& a, const ExchangeStats& b);

// Share of the full-swap traffic avoided: 1 - (in + out) / baseline.
// Zero when nothing has been prefetched yet.
double incremental_savings(const ExchangeStats& s);

struct KeyCollection {
  std::vector<std::string> keys;  // first-seen order
  std::vector<std::uint64_t> counts;
};

struct StoreConfig {
  std::size_t capacity = 1024;  // device-resident rows
  std::size_t dim = 8;          // values per row
  std::size_t row_bytes = 64;   // accounted bytes per row
  std::size_t pin_budget = 0;   // must stay below capacity

  void validate() const;
};

struct PrefetchResult {
  std::vector<std::string> swapped_in;   // batch order
  std::vector<std::string> swapped_out;  // eviction order
  ExchangeStats delta;
};

// A bounded fast tier ("device") in front of an unbounded slow tier
// ("host"). Batches are prefetched before use; missing rows come in from
// the host (zero rows for keys never seen), and the least recently used
// unpinned residents go back to make room. Use, not residency checks,
// refreshes recency: lookup and write_back stamp keys, and a key copied in
// is stamped at the moment it arrives.
class TwoTierStore {
 public:
  using Row = std::vector<double>;

  explicit TwoTierStore(StoreConfig config);

  // Deduplicates a raw batch and adds its counts to the global frequencies.
  KeyCollection key_collect(const std::vector<std::string>& batch);

  // `keys` must be unique. Throws CapacityError when they cannot all be
  // resident at once alongside the pinned residents.
  PrefetchResult prefetch(const std::vector<std::string>& keys);

  // Pins up to pin_budget keys with frequency >= threshold, most frequent
  // first, ties by key. Replaces any previous pinned set.
  std::vector<std::string> pin_high_freq(std::uint64_t threshold);
  void unpin_all();

  // Both throw ContractError for keys that are not resident.
  std::vector<Row> lookup(const std::vector<std::string>& keys);
  void write_back(const std::vector<std::string>& keys, const std::vector<Row>& rows);

  // The authoritative row wherever it lives; zeros for unknown keys.
  Row value(const std::string& key) const;

  bool resident(const std::string& key) const { return device_.count(key) > 0; }
  std::size_t resident_count() const { return device_.size(); }
  std::set<std::string> resident_keys() const;
  // Residents from least to most recently used.
  std::vector<std::string> lru_order() const;
  const std::set<std::string>& pinned() const { return pinned_; }
  std::uint64_t frequency(const std::string& key) const;
  const ExchangeStats& stats() const { return stats_; }
  const StoreConfig& config() const { return config_; }
  std::uint64_t clock() const { return clock_; }
  std::size_t prefetches() const { return prefetches_; }

 private:
  struct Entry {
    Row row;
    std::uint64_t stamp = 0;
  };

  Entry& resident_entry(const std::string& key, const char* op);
  void touch(const std::string& key, Entry& e);

  StoreConfig config_;
  std::unordered_map<std::string, Entry> device_;
  std::unordered_map<std::string, Row> host_;
  std::map<std::uint64_t, std::string> by_stamp_;  // residents, oldest first
  std::set<std::string> pinned_;
  std::unordered_map<std::string, std::uint64_t> freq_;
  std::uint64_t clock_ = 0;
  std::size_t prefetches_ = 0;
  ExchangeStats stats_;
};

using BatchTrace = std::vector<std::vector<std::string>>;

// Each batch keeps round(overlap * batch_size) keys of the previous batch,
// chosen at random, and fills the rest with keys never used before.
BatchTrace overlap_trace(std::size_t batches, std::size_t batch_size, double overlap,
                         std::uint64_t seed);

struct SimulationOptions {
  std::size_t warmup = 1;         // batches excluded from after_warmup
  std::uint64_t pin_threshold = 0;  // 0 disables pinning
};

struct SimulationReport {
  std::vector<ExchangeStats> per_batch;
  ExchangeStats total;
  ExchangeStats after_warmup;
  std::vector<std::string> pinned;  // at the end of the trace
};

// Replays a trace as training would: collect, optionally re-pin, prefetch,
// look up, and write back updated rows.
SimulationReport simulate_store(const StoreConfig& config, const BatchTrace& trace,
                                const SimulationOptions& options);

}  // namespace longseq
