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

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "advisor/inner_speech.hpp"
#include "advisor/query.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace advisor;

namespace {

struct Rig {
  std::shared_ptr<KnowledgeStore> store = advisor::testing::fixture_store();
  RuleBasedRecognizer recognizer;
  Explainer explainer;
  NoteWriter notes;
  TurnDeps deps{*store, recognizer, explainer, notes};
};

bool mentions(const std::vector<InnerSpeechNote>& notes, NoteStage stage, const std::string& text) {
  return std::any_of(notes.begin(), notes.end(),
                     [&](const auto& n) { return n.stage == stage && n.text.find(text) != std::string::npos; });
}

// IntentReceived first, Conclusion last and exactly once, stages never go
// backwards.
void check_stage_path(const TurnOutcome& o) {
  REQUIRE_FALSE(o.notes.empty());
  CHECK(o.notes.front().stage == NoteStage::kIntentReceived);
  CHECK(o.notes.back().stage == NoteStage::kConclusion);
  CHECK(std::count_if(o.notes.begin(), o.notes.end(), [](const auto& n) { return n.stage == NoteStage::kConclusion; }) ==
        1);
  for (std::size_t i = 1; i < o.notes.size(); ++i) {
    CHECK(static_cast<int>(o.notes[i - 1].stage) <= static_cast<int>(o.notes[i].stage));
    CHECK(o.notes[i].seq == o.notes[i - 1].seq + 1);
    CHECK(o.notes[i].turn == o.turn);
  }
}

void check_timings(const TurnOutcome& o) {
  REQUIRE_FALSE(o.timings.empty());
  CHECK(o.timings.back().stage == TimingStage::kTotalTurn);
  double longest = 0;
  double sum = 0;
  for (const auto& t : o.timings) {
    CHECK(t.seconds > 0.0);
    if (t.stage != TimingStage::kTotalTurn) {
      longest = std::max(longest, t.seconds);
      sum += t.seconds;
    }
  }
  CHECK(o.timings.back().seconds >= longest);
  CHECK(sum <= o.timings.back().seconds + kTimingAllowance * static_cast<double>(o.timings.size()));
  for (std::size_t i = 1; i < o.timings.size(); ++i) {
    CHECK(static_cast<int>(o.timings[i - 1].stage) < static_cast<int>(o.timings[i].stage));
  }
}

bool has_stage(const TurnOutcome& o, TimingStage s) {
  return std::any_of(o.timings.begin(), o.timings.end(), [&](const auto& t) { return t.stage == s; });
}

}  // namespace

TEST_CASE("supervision") {
  const Intent only_name{IntentKind::kUserInsertion, {{"name", "marco"}}, ""};
  const auto s = supervise(only_name);
  CHECK(s.decision == Supervision::Decision::kClarify);
  CHECK(s.missing == std::vector<std::string>{"calories", "carbs", "proteins", "fats"});
  CHECK(supervise(Intent{IntentKind::kMealPreparation, {{"user_name", "anna"}}, ""}).decision ==
        Supervision::Decision::kProceed);
  CHECK(supervise(Intent{IntentKind::kOutOfScope, {}, "railguard"}).decision == Supervision::Decision::kReject);
  CHECK(supervise(Intent{IntentKind::kDishInfo, {{"dish_name", "rice"}}, ""}).decision ==
        Supervision::Decision::kProceed);
}

TEST_CASE("Proceed implies compile succeeds on the corpus") {
  RuleBasedRecognizer r;
  for (const auto& line : advisor::testing::read_lines(advisor::testing::data_dir() / "intent_corpus.jsonl")) {
    if (line.empty()) continue;
    const auto utterance = nlohmann::json::parse(line)["utterance"].get<std::string>();
    const auto intent = classify(r, utterance, {});
    if (supervise(intent).decision == Supervision::Decision::kProceed) {
      CHECK_NOTHROW(compile(intent));
    }
  }
}

TEST_CASE("replan cap in supervision") {
  Rig rig;
  DialogueSession s("s", SessionOptions{});
  const Intent incomplete{IntentKind::kUserInsertion, {{"name", "marco"}}, ""};
  s.run_turn("Insert user Marco", rig.deps);
  CHECK(s.replans_used() == 1);
  s.run_turn("what's the weather like?", rig.deps);
  s.run_turn("tell me a joke", rig.deps);
  CHECK(s.replans_used() == 3);
  CHECK(s.state() == SessionState::kAwaitingClarification);
  CHECK_THROWS_AS(supervise(incomplete, s), ReplanCapExceededError);
  const Intent complete{IntentKind::kUserInsertion,
                        {{"calories", "1"}, {"carbs", "1"}, {"proteins", "1"}, {"fats", "1"}},
                        ""};
  CHECK(supervise(complete, s).decision == Supervision::Decision::kProceed);

  DialogueSession fresh("t", SessionOptions{});
  CHECK(supervise(incomplete, fresh).decision == Supervision::Decision::kClarify);
}

TEST_CASE("merging clarifications") {
  const Intent pending{IntentKind::kUserInsertion, {{"name", "marco"}}, ""};
  const Intent numbers{IntentKind::kUserInsertion,
                       {{"calories", "2000"}, {"carbs", "250"}, {"proteins", "80"}, {"fats", "70"}},
                       ""};
  const auto merged = merge_clarification(pending, numbers);
  CHECK(merged.kind == IntentKind::kUserInsertion);
  CHECK(merged.params.size() == 5);
  CHECK(supervise(merged).decision == Supervision::Decision::kProceed);

  const Intent rice{IntentKind::kDishInfo, {{"dish_name", "rice"}}, ""};
  const auto switched = merge_clarification(pending, rice);
  CHECK(switched.kind == IntentKind::kDishInfo);
  CHECK(switched.params == ParamMap{{"dish_name", "rice"}});

  const Intent newer{IntentKind::kUserInsertion, {{"calories", "1800"}}, ""};
  CHECK(merge_clarification(merged, newer).params.at("calories") == "1800");
}

TEST_CASE("short-term memory keeps the newest fragments within budget") {
  ShortTermMemory m(60);
  for (std::uint64_t i = 0; i < 10; ++i) m.append({NoteStage::kParamsChecked, "note number " + std::to_string(i), 0, i});
  CHECK(m.size_chars() <= 60);
  CHECK(m.fragments().back().seq == 9);
  CHECK(m.dropped() + m.fragments().size() == 10);
  std::string expected;
  for (const auto& f : m.fragments()) expected += ShortTermMemory::fragment_text(f);
  CHECK(m.prompt() == expected);
  CHECK(ShortTermMemory::fragment_text({NoteStage::kConclusion, "x", 0, 0}) == "[Conclusion] x\n");

  ShortTermMemory tiny(5);
  tiny.append({NoteStage::kConclusion, "a fragment longer than the budget", 0, 0});
  REQUIRE(tiny.fragments().size() == 1);
  tiny.append({NoteStage::kConclusion, "another long one", 0, 1});
  REQUIRE(tiny.fragments().size() == 1);
  CHECK(tiny.fragments().front().seq == 1);
}

TEST_CASE("a complete meal request") {
  Rig rig;
  DialogueSession s("s", SessionOptions{});
  const auto o = s.run_turn("Prepare a meal for Anna", rig.deps);
  check_stage_path(o);
  check_timings(o);
  CHECK(o.notes.size() >= 5);
  CHECK(o.kind == IntentKind::kMealPreparation);
  CHECK(o.reply_kind == ExplanationKind::kSolverExplanation);
  CHECK(o.reply.find("Option 1: fruit salad, grilled chicken and quinoa salad") != std::string::npos);
  CHECK(o.reply.find("lactose") != std::string::npos);
  CHECK(o.plans.size() == 2);
  CHECK(mentions(o.notes, NoteStage::kConclusion, "fruit salad, grilled chicken and quinoa salad"));
  CHECK(mentions(o.notes, NoteStage::kSolverPlanned, "within 10.0%"));
  CHECK(s.state() == SessionState::kAwaitingInput);
  CHECK(o.disclosed_notes == o.notes);
  for (auto st : {TimingStage::kIntentRecognition, TimingStage::kInnerSpeech, TimingStage::kQueryGeneration,
                  TimingStage::kQueryExecution, TimingStage::kSolver, TimingStage::kQueryExplanation,
                  TimingStage::kSolverExplanation}) {
    CHECK(has_stage(o, st));
  }
}

TEST_CASE("an out-of-scope turn") {
  Rig rig;
  DialogueSession s("s", SessionOptions{});
  const auto o = s.run_turn("what's the weather like?", rig.deps);
  check_stage_path(o);
  check_timings(o);
  CHECK(o.reply_kind == ExplanationKind::kRefusal);
  CHECK(o.reply.find("prepare a meal") != std::string::npos);
  CHECK(s.state() == SessionState::kAwaitingInput);
  CHECK_FALSE(has_stage(o, TimingStage::kSolver));
  CHECK_FALSE(has_stage(o, TimingStage::kQueryExecution));
}

TEST_CASE("an incomplete insertion asks and the answer completes it") {
  Rig rig;
  DialogueSession s("s", SessionOptions{});
  const auto ask = s.run_turn("Insert user Marco", rig.deps);
  check_stage_path(ask);
  CHECK(ask.reply_kind == ExplanationKind::kClarification);
  CHECK(ask.reply.find('?') != std::string::npos);
  CHECK(s.state() == SessionState::kAwaitingClarification);
  CHECK(mentions(ask.notes, NoteStage::kParamsChecked, "calories"));
  CHECK(s.missing() == std::vector<std::string>{"calories", "carbs", "proteins", "fats"});

  const auto done = s.run_turn("calories 700, carbs 80, proteins 40, fats 25", rig.deps);
  check_stage_path(done);
  CHECK(done.reply_kind == ExplanationKind::kConfirmation);
  CHECK(s.state() == SessionState::kAwaitingInput);
  CHECK(rig.store->get_user("marco").needs == Nutrients::from_values(700, 80, 40, 25));
  CHECK_FALSE(has_stage(done, TimingStage::kSolver));
}

TEST_CASE("an unknown dish triggers replanning") {
  Rig rig;
  DialogueSession s("s", SessionOptions{});
  const auto o = s.run_turn("Tell me about the unicorn stew", rig.deps);
  check_stage_path(o);
  CHECK(mentions(o.notes, NoteStage::kQueryObserved, "unicorn stew"));
  CHECK(mentions(o.notes, NoteStage::kQueryObserved, "Replanning"));
  CHECK(s.state() == SessionState::kAwaitingClarification);
  CHECK(s.missing() == std::vector<std::string>{"dish_name"});
  const auto fixed = s.run_turn("the minestrone", rig.deps);
  CHECK(fixed.reply.find("Minestrone has 180.0 kcal") != std::string::npos);
  CHECK(s.state() == SessionState::kAwaitingInput);
  CHECK(s.replans_used() == 0);
}

TEST_CASE("transparency off records notes but discloses none") {
  Rig rig;
  SessionOptions opts;
  opts.transparency = false;
  DialogueSession s("s", opts);
  const auto o = s.run_turn("Prepare a meal for Giulia", rig.deps);
  CHECK_FALSE(o.notes.empty());
  CHECK(o.disclosed_notes.empty());
  CHECK(s.memory().fragments().size() == o.notes.size());
}

TEST_CASE("closed and blank") {
  Rig rig;
  DialogueSession s("s", SessionOptions{});
  CHECK_THROWS_AS(s.run_turn("   ", rig.deps), std::invalid_argument);
  s.close();
  CHECK(s.state() == SessionState::kClosed);
  CHECK_THROWS_AS(s.run_turn("hello", rig.deps), SessionClosedError);
  CHECK_NOTHROW(s.close());
}

TEST_CASE("session options are validated") {
  SessionOptions o;
  CHECK_NOTHROW(o.validate());
  o.replan_cap = 0;
  CHECK_THROWS_AS(o.validate(), InvalidConfigError);
  o = SessionOptions{};
  o.memory_budget = 0;
  CHECK_THROWS_AS(o.validate(), InvalidConfigError);
  o = SessionOptions{};
  o.solver.max_dishes = 0;
  CHECK_THROWS_AS(o.validate(), InvalidConfigError);
}

TEST_CASE("state machine: every turn sequence up to length 6 stays defined and within the cap") {
  for (int cap = 1; cap <= 4; ++cap) {
    std::uint64_t sequences = 0;
    std::function<void(MachineState, int)> walk = [&](MachineState m, int depth) {
      ++sequences;
      CHECK(m.replans <= cap);
      CHECK(m.replans >= 0);
      CHECK((m.state != SessionState::kAwaitingClarification || m.replans >= 1));
      CHECK(m.state != SessionState::kExecuting);
      if (depth == 6) return;
      for (auto e : kAllTurnEvents) {
        auto next = m;
        for (auto micro : expand_turn(m.state, e)) {
          const auto stepped = step(next, micro, cap);
          REQUIRE_MESSAGE(stepped.has_value(), "undefined transition");
          next = *stepped;
          CHECK(next.replans <= cap);
        }
        walk(next, depth + 1);
      }
    };
    walk(MachineState{}, 0);
    CHECK(sequences == 137257);  // 1 + 7 + 7^2 + ... + 7^6
  }
}

TEST_CASE("state machine: micro-level table") {
  const int cap = 2;
  CHECK_FALSE(step({SessionState::kClosed, 0}, MicroEvent::kProceed, cap).has_value());
  CHECK_FALSE(step({SessionState::kAwaitingInput, 0}, MicroEvent::kExecutionDone, cap).has_value());
  CHECK_FALSE(step({SessionState::kExecuting, 0}, MicroEvent::kClose, cap).has_value());
  CHECK(*step({SessionState::kAwaitingInput, 0}, MicroEvent::kClarify, cap) ==
        MachineState{SessionState::kAwaitingClarification, 1});
  CHECK(*step({SessionState::kAwaitingClarification, 2}, MicroEvent::kClarify, cap) ==
        MachineState{SessionState::kAwaitingInput, 0});
  CHECK(*step({SessionState::kAwaitingClarification, 2}, MicroEvent::kTopicSwitch, cap) ==
        MachineState{SessionState::kAwaitingInput, 0});
  CHECK(*step({SessionState::kExecuting, 1}, MicroEvent::kExecutionIncomplete, cap) ==
        MachineState{SessionState::kAwaitingClarification, 2});
  CHECK(expand_turn(SessionState::kClosed, TurnEvent::kComplete).empty());
  CHECK(expand_turn(SessionState::kAwaitingInput, TurnEvent::kTopicSwitchComplete) ==
        expand_turn(SessionState::kAwaitingInput, TurnEvent::kComplete));
}

TEST_CASE("state machine: real sessions follow the model") {
  // Concrete utterances for each observable turn. The store never changes:
  // no insertion here ever completes.
  struct Move {
    const char* utterance;  // nullptr closes the session
    IntentKind kind;
    TurnEvent base;  // outcome ignoring any pending request
  };
  const std::vector<Move> moves = {
      {"Tell me about the lasagna", IntentKind::kDishInfo, TurnEvent::kComplete},
      {"Insert user Marco", IntentKind::kUserInsertion, TurnEvent::kIncomplete},
      {"what's the weather like?", IntentKind::kOutOfScope, TurnEvent::kOutOfScope},
      {"Prepare a meal for Bruno", IntentKind::kMealPreparation, TurnEvent::kQueryIncomplete},
      {nullptr, IntentKind::kOutOfScope, TurnEvent::kClose},
  };
  Rig rig;
  const auto before = rig.store->fingerprint();
  for (int cap : {1, 3}) {
    SessionOptions opts;
    opts.replan_cap = cap;
    std::uint64_t turns = 0;
    std::function<void(const DialogueSession&, MachineState, int)> walk = [&](const DialogueSession& s,
                                                                               MachineState model, int depth) {
      CHECK(s.state() == model.state);
      CHECK(s.replans_used() == model.replans);
      CHECK(s.replans_used() <= cap);
      if (depth == 6 || s.state() == SessionState::kClosed) return;
      for (const auto& mv : moves) {
        DialogueSession next = s;
        // Expected micro events: a different request while one is pending is a
        // topic switch followed by the request's own events.
        std::vector<MicroEvent> micro;
        if (mv.base == TurnEvent::kOutOfScope || mv.base == TurnEvent::kClose || !s.pending() ||
            s.pending()->kind == mv.kind) {
          micro = expand_turn(model.state, mv.base);
        } else {
          micro = {MicroEvent::kTopicSwitch};
          for (auto e : expand_turn(SessionState::kAwaitingInput, mv.base)) micro.push_back(e);
        }
        auto predicted = model;
        for (auto e : micro) {
          const auto stepped = step(predicted, e, cap);
          REQUIRE(stepped.has_value());
          predicted = *stepped;
        }
        if (mv.utterance == nullptr) {
          next.close();
        } else {
          const auto o = next.run_turn(mv.utterance, rig.deps);
          ++turns;
          check_stage_path(o);
          CHECK(o.state_after == next.state());
          CHECK(o.gave_up == (model.replans == cap && predicted.replans == 0 &&
                              predicted.state == SessionState::kAwaitingInput && mv.base != TurnEvent::kComplete &&
                              !(mv.base == TurnEvent::kOutOfScope && model.state == SessionState::kAwaitingInput) &&
                              !(s.pending() && s.pending()->kind != mv.kind && mv.base != TurnEvent::kOutOfScope)));
        }
        walk(next, predicted, depth + 1);
      }
    };
    walk(DialogueSession("enum", opts), MachineState{}, 0);
    CHECK(turns > 1000);
  }
  CHECK(rig.store->fingerprint() == before);
}
