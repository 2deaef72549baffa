// Copyright 2026 The Advisor Authors
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

// Fixture paths and small independent checkers used across test binaries.

#ifndef ADVISOR_TEST_SUPPORT_HPP_
#define ADVISOR_TEST_SUPPORT_HPP_

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "advisor/domain.hpp"
#include "advisor/knowledge_store.hpp"

namespace advisor::testing {

inline std::filesystem::path data_dir() { return ADVISOR_TEST_DATA_DIR; }
inline std::filesystem::path golden_dir() { return ADVISOR_GOLDEN_DIR; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// The fixture store: 22 dishes, users Anna, Elena, Giulia, Paolo and Sara.
inline std::shared_ptr<KnowledgeStore> fixture_store() {
  return std::make_shared<KnowledgeStore>(KnowledgeStore::load_snapshot(data_dir() / "store.json"));
}

// 10 * |total - target| <= target on every nutrient, in integer tenths.
inline bool within_ten_percent(const Nutrients& totals, const Nutrients& targets) {
  for (std::size_t i = 0; i < 4; ++i) {
    const auto diff = totals.raw()[i] - targets.raw()[i];
    if (10 * (diff < 0 ? -diff : diff) > targets.raw()[i]) return false;
  }
  return true;
}

inline bool shares_allergen(const AllergenSet& a, const AllergenSet& b) {
  for (const auto& x : a) {
    if (b.count(x) != 0) return true;
  }
  return false;
}

}  // namespace advisor::testing

#endif  // ADVISOR_TEST_SUPPORT_HPP_
