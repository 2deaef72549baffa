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

// Golden dialogue scripts. One utterance per line; `#` lines are comments and
// `@` lines are directives:
//   @cap N            replan cap for the session (first line only)
//   @transparency off
//   @close            close the session

#ifndef ADVISOR_GOLDEN_HPP_
#define ADVISOR_GOLDEN_HPP_

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "advisor/inner_speech.hpp"
#include "advisor/query.hpp"
#include "test_support.hpp"

namespace advisor::testing {

// Timings are left out: they are the only nondeterministic part of a turn.
// `store` defaults to a fresh fixture store.
inline std::string render_script(const std::vector<std::string>& lines,
                                 std::shared_ptr<KnowledgeStore> store = nullptr) {
  if (!store) store = fixture_store();
  RuleBasedRecognizer recognizer;
  Explainer explainer;
  NoteWriter notes;
  const TurnDeps deps{*store, recognizer, explainer, notes};
  SessionOptions opts;
  std::size_t i = 0;
  for (; i < lines.size() && (lines[i].empty() || lines[i][0] == '#' || lines[i].rfind("@cap ", 0) == 0 ||
                              lines[i] == "@transparency off");
       ++i) {
    if (lines[i].rfind("@cap ", 0) == 0) opts.replan_cap = std::stoi(lines[i].substr(5));
    if (lines[i] == "@transparency off") opts.transparency = false;
  }
  DialogueSession session("golden", opts);
  std::string out;
  for (; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    if (line == "@close") {
      session.close();
      out += fmt::format("@close\n= {}\n", session_state_name(session.state()));
      continue;
    }
    const auto o = session.run_turn(line, deps);
    out += fmt::format("> {}\n", line);
    for (const auto& n : o.disclosed_notes) out += fmt::format("  [{}] {}\n", note_stage_name(n.stage), n.text);
    out += fmt::format("< {}\n", o.reply);
    out += fmt::format("= {} {} replans={}{}\n", intent_kind_name(o.kind), session_state_name(o.state_after),
                       session.replans_used(), o.gave_up ? " gave_up" : "");
  }
  return out;
}

inline std::vector<std::filesystem::path> golden_scripts() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(golden_dir())) {
    if (e.path().extension() == ".script") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace advisor::testing

#endif  // ADVISOR_GOLDEN_HPP_
