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

#include "longseq/trajectory/taxonomy.h"

#include <cctype>
#include <cstdio>

#include "longseq/core/error.h"

namespace longseq {

void CategoryTaxonomy::add_node(CategoryNode node) {
  if (node.id.empty()) throw ConfigError("category node with empty id");
  if (nodes_.count(node.id)) throw ConfigError("duplicate category id '" + node.id + "'");
  if (node.level < 1 || node.level > 3) {
    throw ConfigError("category '" + node.id + "' has level " + std::to_string(node.level) +
                      ", expected 1..3");
  }
  if (node.level == 1 && !node.parent.empty()) {
    throw ConfigError("level-1 category '" + node.id + "' must not have a parent");
  }
  if (node.level > 1 && node.parent.empty()) {
    throw ConfigError("category '" + node.id + "' at level " + std::to_string(node.level) +
                      " needs a parent");
  }
  if (node.display_name.empty()) node.display_name = node.name;
  if (!node.parent.empty()) {
    auto it = nodes_.find(node.parent);
    if (it != nodes_.end() && it->second.level + 1 != node.level) {
      throw ConfigError("category '" + node.id + "' level " + std::to_string(node.level) +
                        " does not follow parent '" + node.parent + "' level " +
                        std::to_string(it->second.level));
    }
    children_[node.parent].push_back(node.id);
  }
  nodes_.emplace(node.id, std::move(node));
}

void CategoryTaxonomy::set_schema(const std::string& leaf_id, std::vector<std::string> keys) {
  schemas_[leaf_id] = std::move(keys);
}

void CategoryTaxonomy::validate() const {
  for (const auto& [id, n] : nodes_) {
    if (n.parent.empty()) continue;
    auto it = nodes_.find(n.parent);
    if (it == nodes_.end()) {
      throw ConfigError("category '" + id + "' has unknown parent '" + n.parent + "'");
    }
    if (it->second.level + 1 != n.level) {
      throw ConfigError("category '" + id + "' level does not follow its parent");
    }
  }
  for (const auto& [leaf, keys] : schemas_) {
    if (!nodes_.count(leaf)) throw ConfigError("property schema for unknown category '" + leaf + "'");
  }
}

const CategoryNode& CategoryTaxonomy::node(const std::string& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw IndexError("unknown category id '" + id + "'");
  return it->second;
}

bool CategoryTaxonomy::is_leaf(const std::string& id) const {
  if (!contains(id)) return false;
  auto it = children_.find(id);
  return it == children_.end() || it->second.empty();
}

const std::vector<std::string>& CategoryTaxonomy::schema(const std::string& leaf_id) const {
  static const std::vector<std::string> kEmpty;
  auto it = schemas_.find(leaf_id);
  return it == schemas_.end() ? kEmpty : it->second;
}

bool CategoryTaxonomy::path_consistent(const std::string& l1, const std::string& l2,
                                       const std::string& l3) const {
  const std::string* levels[3] = {&l1, &l2, &l3};
  bool ended = false;
  for (int i = 0; i < 3; ++i) {
    const std::string& id = *levels[i];
    if (id.empty()) {
      ended = true;
      continue;
    }
    if (ended) return false;  // gap, e.g. l3 set while l2 empty
    auto it = nodes_.find(id);
    if (it == nodes_.end() || it->second.level != i + 1) return false;
    if (i > 0 && it->second.parent != *levels[i - 1]) return false;
  }
  return true;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string normalize_spu_key(std::string_view key) {
  std::string out;
  out.reserve(key.size());
  bool pending_space = false;
  for (unsigned char c : key) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::string spu_id_for_key(std::string_view key) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(normalize_spu_key(key))));
  return buf;
}

Spu build_spu(const ProductRecord& product, const CategoryTaxonomy& taxonomy) {
  const auto& path = product.category_path;
  std::string l[3];
  for (std::size_t i = 0; i < path.size() && i < 3; ++i) l[i] = path[i];
  if (path.empty() || path.size() > 3 || path.back().empty() ||
      !taxonomy.path_consistent(l[0], l[1], l[2])) {
    throw DataError("product '" + product.product_id + "': category path does not resolve");
  }
  const std::string& leaf = path.back();
  if (!taxonomy.is_leaf(leaf)) {
    throw DataError("product '" + product.product_id + "': category '" + leaf +
                    "' is not a leaf");
  }

  std::string key;
  for (const std::string& prop : taxonomy.schema(leaf)) {
    for (const auto& [k, v] : product.properties) {
      if (k != prop) continue;
      if (!v.empty()) {
        key += v;
        key += ' ';
      }
      break;
    }
  }
  key += taxonomy.node(leaf).display_name;
  return Spu{key, spu_id_for_key(key)};
}

}  // namespace longseq
