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

#include <cmath>
#include <map>
#include <set>

#include "longseq/core/error.h"
#include "longseq/core/random.h"
#include "longseq/store/store.h"
#include "support/lru_oracle.h"

using namespace longseq;

namespace {

StoreConfig cfg(std::size_t capacity, std::size_t pin_budget = 0, std::size_t dim = 2) {
  StoreConfig c;
  c.capacity = capacity;
  c.dim = dim;
  c.row_bytes = dim * 8;
  c.pin_budget = pin_budget;
  return c;
}

void check_accounting(const TwoTierStore& s) {
  const ExchangeStats& st = s.stats();
  CHECK(st.bytes_in == st.swapped_in_keys * s.config().row_bytes);
  CHECK(st.bytes_out == st.swapped_out_keys * s.config().row_bytes);
  CHECK(st.swapped_in_keys == st.misses);
  CHECK(s.resident_count() <= s.config().capacity);
}

}  // namespace

TEST_CASE("key_collect deduplicates in first-seen order") {
  TwoTierStore s(cfg(4));
  KeyCollection empty = s.key_collect({});
  CHECK(empty.keys.empty());
  CHECK(empty.counts.empty());
  KeyCollection c = s.key_collect({"a", "b", "a"});
  CHECK(c.keys == std::vector<std::string>{"a", "b"});
  CHECK(c.counts == std::vector<std::uint64_t>{2, 1});
  s.key_collect({"a"});
  CHECK(s.frequency("a") == 3);
  CHECK(s.frequency("z") == 0);
}

TEST_CASE("key_collect counts match a brute-force tally") {
  TwoTierStore s(cfg(4));
  Rng rng(5);
  std::vector<std::string> batch;
  for (int i = 0; i < 10000; ++i) batch.push_back("k" + std::to_string(rng.below(300)));
  KeyCollection c = s.key_collect(batch);
  std::map<std::string, std::uint64_t> tally;
  for (const std::string& k : batch) ++tally[k];
  REQUIRE(c.keys.size() == tally.size());
  for (std::size_t i = 0; i < c.keys.size(); ++i) {
    CHECK(c.counts[i] == tally[c.keys[i]]);
    CHECK(s.frequency(c.keys[i]) == tally[c.keys[i]]);
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (seen.insert(batch[i]).second) CHECK(c.keys[seen.size() - 1] == batch[i]);
  }
}

TEST_CASE("warm cache and single cold batch") {
  TwoTierStore s(cfg(10));
  PrefetchResult first = s.prefetch({"a", "b", "c"});
  CHECK(first.delta.swapped_in_keys == 3);
  CHECK(first.delta.swapped_out_keys == 0);
  CHECK(incremental_savings(s.stats()) == doctest::Approx(0.5).epsilon(1e-15));
  PrefetchResult second = s.prefetch({"a", "b", "c"});
  CHECK(second.delta.swapped_in_keys == 0);
  CHECK(second.delta.hits == 3);
  CHECK(s.value("a") == std::vector<double>{0.0, 0.0});
  check_accounting(s);
  CHECK(incremental_savings(ExchangeStats{}) == 0.0);
}

TEST_CASE("LRU evictions follow the reference example") {
  TwoTierStore s(cfg(2));
  s.prefetch({"a", "b"});
  CHECK(s.prefetch({"b", "c"}).swapped_out == std::vector<std::string>{"a"});
  CHECK(s.prefetch({"a", "c"}).swapped_out == std::vector<std::string>{"b"});
  CHECK(s.resident_keys() == std::set<std::string>{"a", "c"});
}

TEST_CASE("lookup and write_back enforce the prefetch contract") {
  TwoTierStore s(cfg(2));
  CHECK_THROWS_AS(s.lookup({"a"}), ContractError);
  s.prefetch({"a", "b"});
  s.write_back({"a"}, {{1.0, 2.0}});
  CHECK(s.lookup({"a"})[0] == std::vector<double>{1.0, 2.0});
  CHECK(s.stats().hits == 0);
  s.prefetch({"a"});
  CHECK(s.stats().hits == 1);
  CHECK_THROWS_AS(s.write_back({"c"}, {{0.0, 0.0}}), ContractError);
  CHECK_THROWS_AS(s.write_back({"a"}, {{0.0}}), ContractError);
  CHECK_THROWS_AS(s.write_back({"a"}, {}), ContractError);
  CHECK_THROWS_AS(s.prefetch({"a", "a"}), ContractError);
  // Evicted rows survive in the host tier and come back intact.
  s.prefetch({"c", "d"});
  CHECK_FALSE(s.resident("a"));
  CHECK(s.value("a") == std::vector<double>{1.0, 2.0});
  s.prefetch({"a"});
  CHECK(s.lookup({"a"})[0] == std::vector<double>{1.0, 2.0});
}

TEST_CASE("capacity and pinning errors") {
  CHECK_THROWS_AS(TwoTierStore(cfg(3, 3)), ConfigError);
  CHECK_THROWS_AS(TwoTierStore(cfg(0)), ConfigError);
  TwoTierStore s(cfg(3, 2));
  CHECK_THROWS_AS(s.prefetch({"a", "b", "c", "d"}), CapacityError);
  s.key_collect({"a", "a", "b", "b", "c"});
  CHECK_THROWS_AS(s.pin_high_freq(0), ConfigError);
  CHECK(s.pin_high_freq(2) == std::vector<std::string>{"a", "b"});
  s.prefetch({"a", "b"});
  try {
    s.prefetch({"x", "y"});
    FAIL("expected a capacity error");
  } catch (const CapacityError& e) {
    CHECK(std::string(e.what()).find("needs 1 more") != std::string::npos);
  }
  s.unpin_all();
  CHECK(s.pinned().empty());
  CHECK_NOTHROW(s.prefetch({"x", "y"}));
}

TEST_CASE("pinning keeps hot keys through adversarial traffic") {
  TwoTierStore none(cfg(4, 2));
  none.key_collect({"a", "b"});
  CHECK(none.pin_high_freq(~std::uint64_t{0}).empty());

  TwoTierStore s(cfg(4, 1));
  std::vector<std::string> hot(10, "a");
  hot.push_back("b");
  s.key_collect(hot);
  CHECK(s.pin_high_freq(5) == std::vector<std::string>{"a"});
  s.prefetch({"a"});
  testing::LruOracle oracle(4, 2);
  oracle.set_pinned({"a"});
  oracle.prefetch({"a"});
  for (int step = 0; step < 200; ++step) {
    std::vector<std::string> batch;
    for (int j = 0; j < 3; ++j) batch.push_back("cold" + std::to_string(3 * step + j));
    PrefetchResult r = s.prefetch(batch);
    CHECK(r.swapped_out == oracle.prefetch(batch));
    for (const std::string& k : r.swapped_out) CHECK(k != "a");
    CHECK(s.resident("a"));
    CHECK(s.resident_keys() == oracle.resident());
  }
}

TEST_CASE("overlapping batches swap in only the new keys") {
  for (const double rho : {0.6, 0.75}) {
    TwoTierStore s(cfg(100000));
    const std::size_t batch = 20, overlap = static_cast<std::size_t>(rho * batch);
    std::size_t next = 0;
    std::vector<std::string> prev;
    for (std::size_t i = 0; i < batch; ++i) prev.push_back("k" + std::to_string(next++));
    s.prefetch(prev);
    const ExchangeStats warm = s.stats();
    for (int step = 0; step < 100; ++step) {
      std::vector<std::string> cur(prev.end() - overlap, prev.end());
      while (cur.size() < batch) cur.push_back("k" + std::to_string(next++));
      PrefetchResult r = s.prefetch(cur);
      CHECK(r.delta.swapped_in_keys == batch - overlap);
      CHECK(r.delta.swapped_out_keys == 0);
      prev = cur;
    }
    const double after_warmup = incremental_savings(s.stats() - warm);
    CHECK(after_warmup == doctest::Approx(1.0 - (1.0 - rho) / 2.0));
    CHECK(after_warmup >= rho);
  }
}

TEST_CASE("store matches the LRU oracle on randomized operation streams") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    INFO("seed " << seed);
    CHECK(testing::store_stream_mismatches(seed, 100000) == 0);
  }
}

TEST_CASE("overlap traces keep the requested share of the previous batch") {
  const BatchTrace t = overlap_trace(30, 40, 0.75, 8);
  REQUIRE(t.size() == 30);
  for (std::size_t b = 0; b < t.size(); ++b) {
    const std::set<std::string> cur(t[b].begin(), t[b].end());
    CHECK(cur.size() == 40);
    if (b == 0) continue;
    std::size_t shared = 0;
    for (const std::string& k : t[b - 1]) shared += cur.count(k);
    CHECK(shared == 30);
  }
  CHECK(overlap_trace(30, 40, 0.75, 8) == t);
  CHECK_THROWS_AS(overlap_trace(3, 4, 1.5, 1), ConfigError);
}

TEST_CASE("simulated savings on an overlap trace with ample capacity") {
  for (double rho : {0.0, 0.5, 0.75, 1.0}) {
    const BatchTrace t = overlap_trace(200, 64, rho, 3);
    const SimulationReport r = simulate_store(cfg(100000), t, SimulationOptions{});
    const std::size_t fresh = 64 - static_cast<std::size_t>(std::llround(rho * 64));
    for (std::size_t b = 1; b < r.per_batch.size(); ++b) {
      CHECK(r.per_batch[b].swapped_in_keys == fresh);
      CHECK(r.per_batch[b].swapped_out_keys == 0);
    }
    CHECK(incremental_savings(r.after_warmup) ==
          doctest::Approx(1.0 - static_cast<double>(fresh) / 128.0).epsilon(1e-12));
  }
}

TEST_CASE("simulation pins frequent keys within the budget") {
  BatchTrace t;
  for (int b = 0; b < 50; ++b) t.push_back({"hot", "warm" + std::to_string(b % 2), "cold" + std::to_string(b)});
  SimulationOptions o;
  o.pin_threshold = 5;
  const SimulationReport r = simulate_store(cfg(4, 2), t, o);
  CHECK(r.pinned == std::vector<std::string>{"hot", "warm0"});
  CHECK(r.total.swapped_in_keys == r.total.misses);
}
