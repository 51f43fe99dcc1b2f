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

#include "longseq/models/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "longseq/core/error.h"
#include "longseq/trajectory/io.h"

namespace longseq {
namespace {

constexpr const char* kFormat = "longseq-checkpoint-1";

void append_f64(std::string& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

double read_f64(const std::string& in, std::size_t offset) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + b])) << (8 * b);
  }
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StateError("cannot open '" + tmp.string() + "' for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw StateError("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_checkpoint(const std::filesystem::path& dir, const Model& model, const VocabMap& vocab) {
  Json manifest;
  manifest["format"] = kFormat;
  manifest["model"] = model_config_to_json(model.config());
  manifest["vocab_sizes"] = model.vocab_sizes();
  manifest["categories"] = model.categories();
  manifest["seed"] = model.seed();
  Json index = Json::array();
  std::string blob;
  for (const Parameter* p : model.params().all()) {
    index.push_back({{"name", p->name},
                     {"rows", p->value.rows()},
                     {"cols", p->value.cols()},
                     {"offset", blob.size()}});
    for (double v : p->value.storage()) append_f64(blob, v);
  }
  manifest["params"] = std::move(index);
  write_file_atomic(dir / "params.bin", blob);
  write_file_atomic(dir / "vocab.json", vocab_to_json(vocab).dump(1) + "\n");
  write_file_atomic(dir / "manifest.json", manifest.dump(1) + "\n");
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& dir) {
  Json manifest;
  try {
    manifest = Json::parse(read_file(dir / "manifest.json"));
  } catch (const Json::exception& e) {
    throw DataError("bad checkpoint manifest: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != kFormat) throw DataError("unsupported checkpoint format");
  LoadedCheckpoint out;
  out.vocab = vocab_from_json(Json::parse(read_file(dir / "vocab.json")));
  ModelConfig cfg = model_config_from_json(manifest.at("model"));
  const auto sizes = manifest.at("vocab_sizes").get<std::vector<std::size_t>>();
  if (sizes != vocab_sizes_for(cfg, out.vocab) ||
      manifest.at("categories").get<std::size_t>() != out.vocab.size(cfg.category_field)) {
    throw DataError("checkpoint vocabulary does not match its manifest");
  }
  out.model = std::make_unique<Model>(cfg, sizes, manifest.at("categories").get<std::size_t>(),
                                      manifest.at("seed").get<std::uint64_t>());
  const std::string blob = read_file(dir / "params.bin");
  const Json& index = manifest.at("params");
  auto params = out.model->params().all();
  if (index.size() != params.size()) throw DataError("checkpoint parameter count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    const Json& entry = index[i];
    if (entry.at("name").get<std::string>() != p.name ||
        entry.at("rows").get<std::size_t>() != p.value.rows() ||
        entry.at("cols").get<std::size_t>() != p.value.cols()) {
      throw DataError("checkpoint parameter '" + entry.at("name").get<std::string>() +
                      "' does not match the model");
    }
    const std::size_t offset = entry.at("offset").get<std::size_t>();
    if (offset + 8 * p.value.size() > blob.size()) throw DataError("params.bin is truncated");
    for (std::size_t k = 0; k < p.value.size(); ++k) p.value[k] = read_f64(blob, offset + 8 * k);
  }
  return out;
}

}  // namespace longseq
