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

#include "homsim/csv.hpp"

#include <ostream>
#include <sstream>

namespace homsim {
namespace {

constexpr const char* kConfigBegin = "# --- config ---";
constexpr const char* kConfigEnd = "# --- end config ---";

}  // namespace

const char* version() { return HOMSIM_VERSION_STRING; }

void write_metadata(std::ostream& out, const Metadata& meta) {
  out << "# homsim " << version() << '\n';
  if (!meta.command.empty()) out << "# command: " << meta.command << '\n';
  for (const auto& [key, value] : meta.flags) out << "# flag " << key << ": " << value << '\n';
  if (!meta.config.empty()) {
    out << kConfigBegin << '\n';
    std::istringstream lines(meta.config);
    std::string line;
    while (std::getline(lines, line)) out << "# " << line << '\n';
    out << kConfigEnd << '\n';
  }
}

std::string strip_metadata_config(const std::string& artifact) {
  std::istringstream in(artifact);
  std::ostringstream out;
  std::string line;
  bool inside = false;
  while (std::getline(in, line)) {
    if (line == kConfigBegin) {
      inside = true;
    } else if (line == kConfigEnd) {
      inside = false;
    } else if (inside && line.starts_with("# ")) {
      out << line.substr(2) << '\n';
    }
  }
  return out.str();
}

}  // namespace homsim
