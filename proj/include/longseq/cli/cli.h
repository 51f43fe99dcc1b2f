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

#include <ostream>
#include <string>
#include <vector>

namespace longseq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Runs one command line, program name excluded. Results go to `out`; the
// one-line JSON error record and usage text go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// ISO-8601 UTC creation time for output headers. SOURCE_DATE_EPOCH, when
// set, replaces the clock.
std::string creation_time();

}  // namespace longseq::cli
