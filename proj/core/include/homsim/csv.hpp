// Copyright 2026 The homsim Authors
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

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace homsim {

/// Library version, e.g. "0.1.0".
const char* version();

/// Comment block written ahead of every CSV artifact. Each line starts with
/// "# " so CSV readers can skip it.
struct Metadata {
  std::string command;
  /// Interpretation choices that affect the numbers (key, value).
  std::vector<std::pair<std::string, std::string>> flags;
  /// Resolved configuration text, embedded line by line.
  std::string config;
};

void write_metadata(std::ostream& out, const Metadata& meta);

/// Text with the "# " metadata prefix removed from every line that has it;
/// lines without it are dropped. Recovers the embedded configuration of an
/// artifact.
std::string strip_metadata_config(const std::string& artifact);

}  // namespace homsim
