// Copyright 2026 The RevFuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REVFUZZ_JSONL_HPP_
#define REVFUZZ_JSONL_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "revfuzz/common.hpp"

namespace revfuzz {

// Stage artifacts are JSONL: one header record carrying kind+schema_version,
// then one record per line. Keys serialize alphabetically, so files are
// byte-stable for identical content.

struct JsonlFile {
  nlohmann::json header;
  std::vector<nlohmann::json> records;
};

inline JsonlFile read_jsonl(const std::filesystem::path& path,
                            const std::string& expected_kind = "") {
  JsonlFile out;
  std::string text = read_file(path);
  auto lines = split_lines(text);
  size_t lineno = 0;
  for (const auto& line : lines) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FatalError(path.string() + ":" + std::to_string(lineno) +
                       ": malformed JSON record: " + e.what());
    }
    if (lineno == 1 && j.contains("kind") && j.contains("schema_version")) {
      out.header = j;
      if (!expected_kind.empty() && j["kind"].get<std::string>() != expected_kind) {
        throw FatalError(path.string() + ": expected kind '" + expected_kind +
                         "', found '" + j["kind"].get<std::string>() + "'");
      }
      continue;
    }
    out.records.push_back(std::move(j));
  }
  if (!expected_kind.empty() && out.header.is_null()) {
    throw FatalError(path.string() + ": missing header record");
  }
  return out;
}

inline void write_jsonl(const std::filesystem::path& path, const nlohmann::json& header,
                        const std::vector<nlohmann::json>& records) {
  std::string out;
  if (!header.is_null()) {
    out += header.dump();
    out += '\n';
  }
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  write_file(path, out);
}

inline nlohmann::json make_header(const std::string& kind) {
  return nlohmann::json{{"kind", kind}, {"schema_version", 1}};
}

}  // namespace revfuzz

#endif  // REVFUZZ_JSONL_HPP_
