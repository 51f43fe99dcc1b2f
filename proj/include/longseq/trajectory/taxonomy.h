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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace longseq {

struct CategoryNode {
  std::string id;
  std::string name;
  std::string display_name;  // defaults to name
  int level = 1;
  std::string parent;  // empty for level-1 roots
};

class CategoryTaxonomy {
 public:
  // Throws ConfigError on duplicate ids, bad levels, dangling parents, or a
  // level that is not parent level + 1 (which also rules out cycles).
  void add_node(CategoryNode node);
  void set_schema(const std::string& leaf_id, std::vector<std::string> keys);
  // Re-checks every parent edge; add_node validates eagerly only when the
  // parent is already present.
  void validate() const;

  bool contains(const std::string& id) const { return nodes_.count(id) != 0; }
  const CategoryNode& node(const std::string& id) const;
  bool is_leaf(const std::string& id) const;
  // Empty when the leaf has no schema entry.
  const std::vector<std::string>& schema(const std::string& leaf_id) const;
  std::size_t size() const { return nodes_.size(); }

  // Accepts (l1, l2, l3) with trailing levels possibly empty. True iff every
  // non-empty level exists, sits at the right level, and chains by parent.
  // An all-empty path is consistent.
  bool path_consistent(const std::string& l1, const std::string& l2,
                       const std::string& l3) const;

 private:
  std::map<std::string, CategoryNode> nodes_;
  std::map<std::string, std::vector<std::string>> children_;
  std::map<std::string, std::vector<std::string>> schemas_;
};

struct ProductRecord {
  std::string product_id;
  std::string title;
  std::vector<std::string> category_path;  // l1, l2[, l3]
  std::vector<std::pair<std::string, std::string>> properties;
};

struct Spu {
  std::string key;
  std::string id;
};

std::uint64_t fnv1a64(std::string_view s);
// ASCII casefold, runs of whitespace collapsed to one space, ends trimmed.
std::string normalize_spu_key(std::string_view key);
std::string spu_id_for_key(std::string_view key);

// Throws DataError when the path does not resolve to a leaf of `taxonomy`.
Spu build_spu(const ProductRecord& product, const CategoryTaxonomy& taxonomy);

}  // namespace longseq
