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

// Each tests/golden/NAME.script is replayed and compared with NAME.golden.
// UPDATE_GOLDEN=1 rewrites the expected files instead.

#include <cstdlib>
#include <fstream>
#include <string>

#include "doctest.h"
#include "golden.hpp"

using namespace advisor::testing;

TEST_CASE("golden dialogues") {
  const auto scripts = golden_scripts();
  CHECK(scripts.size() >= 12);
  const char* update = std::getenv("UPDATE_GOLDEN");
  const bool rewrite = update != nullptr && std::string(update) == "1";
  for (const auto& script : scripts) {
    auto expected_path = script;
    expected_path.replace_extension(".golden");
    const auto actual = render_script(read_lines(script));
    if (rewrite) {
      std::ofstream(expected_path, std::ios::binary) << actual;
      continue;
    }
    CAPTURE(script.filename().string());
    REQUIRE_MESSAGE(std::filesystem::exists(expected_path), "missing ", expected_path.string());
    CHECK(read_text(expected_path) == actual);
  }
}

TEST_CASE("rendering is deterministic") {
  for (const auto& script : golden_scripts()) {
    const auto lines = read_lines(script);
    CHECK(render_script(lines) == render_script(lines));
  }
}
