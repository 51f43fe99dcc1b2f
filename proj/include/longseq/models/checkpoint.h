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

#include <filesystem>
#include <memory>

#include "longseq/models/model.h"
#include "longseq/trajectory/vocab.h"

namespace longseq {

// A directory holding manifest.json (model config, dims, parameter index),
// params.bin (little-endian float64 values, concatenated in index order) and
// vocab.json.
void save_checkpoint(const std::filesystem::path& dir, const Model& model, const VocabMap& vocab);

struct LoadedCheckpoint {
  std::unique_ptr<Model> model;
  VocabMap vocab;
};

// Throws DataError on any mismatch between manifest, parameters and vocab.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& dir);

// Writes `data` to `path` through a sibling temp file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& data);
std::string read_file(const std::filesystem::path& path);

}  // namespace longseq
