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

#include "longseq/harness/dataset.h"

#include <fstream>
#include <map>
#include <sstream>

#include "longseq/core/error.h"
#include "longseq/models/checkpoint.h"
#include "longseq/trajectory/io.h"
#include "longseq/trajectory/trajectory.h"

namespace longseq {

std::string events_to_jsonl(const Dataset& data) {
  std::ostringstream out;
  for (const Trajectory& t : data.users) write_events(out, t.events);
  return out.str();
}

std::string samples_to_jsonl(const Dataset& data) {
  std::ostringstream out;
  for (const Sample& s : data.samples) {
    Json j = {{"user_id", data.users.at(s.user).user_id},
              {"target", target_to_json(s.target)},
              {"label", static_cast<int>(s.label)}};
    out << j.dump() << '\n';
  }
  return out.str();
}

void save_dataset(const std::filesystem::path& dir, const Dataset& data) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "events.jsonl", events_to_jsonl(data));
  write_file_atomic(dir / "samples.jsonl", samples_to_jsonl(data));
  write_file_atomic(dir / "manifest.json", data.manifest.dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset data;
  std::ifstream events(dir / "events.jsonl");
  if (!events) throw DataError("cannot open " + (dir / "events.jsonl").string());
  IngestResult ingest = ingest_events(events);
  if (!ingest.rejects.empty()) {
    throw DataError("events.jsonl line " + std::to_string(ingest.rejects.front().line_no) + ": " +
                    ingest.rejects.front().reason);
  }
  Consolidated c = consolidate(ingest.events);
  std::map<std::string, std::size_t> index;
  for (auto& [id, traj] : c.users) {
    index[id] = data.users.size();
    data.users.push_back(std::move(traj));
  }

  std::ifstream samples(dir / "samples.jsonl");
  if (!samples) throw DataError("cannot open " + (dir / "samples.jsonl").string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(samples, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "samples.jsonl line " + std::to_string(line_no) + ": ";
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw DataError(where + "malformed JSON");
    try {
      const std::string user = j.at("user_id").get<std::string>();
      auto it = index.find(user);
      if (it == index.end()) {
        // A user with no behaviors still gets an (empty) trajectory.
        it = index.emplace(user, data.users.size()).first;
        data.users.push_back(Trajectory{user, {}});
      }
      Sample s;
      s.user = it->second;
      s.target = target_from_json(j.at("target"));
      const int label = j.at("label").get<int>();
      if (label != 0 && label != 1) throw DataError("label must be 0 or 1");
      s.label = label;
      data.samples.push_back(std::move(s));
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    } catch (const Json::exception& e) {
      throw DataError(where + e.what());
    }
  }
  const auto manifest = dir / "manifest.json";
  if (std::filesystem::exists(manifest)) {
    data.manifest = Json::parse(read_file(manifest), nullptr, false);
    if (data.manifest.is_discarded()) throw DataError("manifest.json is not valid JSON");
  }
  return data;
}

}  // namespace longseq
