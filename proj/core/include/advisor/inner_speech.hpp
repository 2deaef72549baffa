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

// Plan phase of a dialogue turn: supervision of extracted parameters,
// note-taking self-dialogue kept in short-term memory, and the replanning
// loop.

#ifndef ADVISOR_INNER_SPEECH_HPP_
#define ADVISOR_INNER_SPEECH_HPP_

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "advisor/explainer.hpp"
#include "advisor/intent.hpp"
#include "advisor/knowledge_store.hpp"
#include "advisor/llm.hpp"
#include "advisor/solver.hpp"
#include "advisor/templates.hpp"

namespace advisor {

enum class NoteStage : std::uint8_t {
  kIntentReceived,
  kParamsChecked,
  kClarificationAsked,
  kQueryPlanned,
  kQueryObserved,
  kSolverPlanned,
  kSolverObserved,
  kConclusion,
};

std::string_view note_stage_name(NoteStage s);

struct InnerSpeechNote {
  NoteStage stage = NoteStage::kIntentReceived;
  std::string text;
  // Logical timestamp: turn index and position within the session.
  std::uint64_t turn = 0;
  std::uint64_t seq = 0;

  friend bool operator==(const InnerSpeechNote&, const InnerSpeechNote&) = default;
};

// Ordered note fragments whose concatenation feeds the recognizer context.
// When the concatenation exceeds the budget (in characters), whole fragments
// are dropped oldest first; the newest fragment is always kept.
class ShortTermMemory {
 public:
  explicit ShortTermMemory(std::size_t budget = 4096) : budget_(budget) {}

  void append(InnerSpeechNote note);
  const std::deque<InnerSpeechNote>& fragments() const { return fragments_; }
  std::string prompt() const;
  std::size_t size_chars() const { return chars_; }
  std::size_t budget() const { return budget_; }
  std::uint64_t dropped() const { return dropped_; }

  // "[stage] text\n"
  static std::string fragment_text(const InnerSpeechNote& note);

 private:
  std::size_t budget_;
  std::size_t chars_ = 0;
  std::uint64_t dropped_ = 0;
  std::deque<InnerSpeechNote> fragments_;
};

enum class SessionState : std::uint8_t { kAwaitingInput, kAwaitingClarification, kExecuting, kClosed };

std::string_view session_state_name(SessionState s);

// ---------------------------------------------------------------------------
// Transition table.

enum class MicroEvent : std::uint8_t {
  kProceed,
  kClarify,
  kReject,
  kTopicSwitch,
  kExecutionDone,
  kExecutionIncomplete,
  kClose,
};

struct MachineState {
  SessionState state = SessionState::kAwaitingInput;
  int replans = 0;

  friend bool operator==(const MachineState&, const MachineState&) = default;
};

// nullopt marks an undefined transition. A Clarify (or an incomplete
// execution, or a Reject while awaiting clarification) with the cap already
// used up gives up and returns to AwaitingInput with a fresh counter.
std::optional<MachineState> step(MachineState s, MicroEvent e, int replan_cap);

// What one whole turn does to the machine, as observed from outside.
enum class TurnEvent : std::uint8_t {
  kComplete,             // all params bound, queries succeed
  kIncomplete,           // params missing
  kOutOfScope,
  kQueryIncomplete,      // params bound, a query comes back empty
  kTopicSwitchComplete,  // a different request kind, complete
  kTopicSwitchIncomplete,
  kClose,
};

inline constexpr std::array<TurnEvent, 7> kAllTurnEvents = {
    TurnEvent::kComplete,           TurnEvent::kIncomplete,          TurnEvent::kOutOfScope,
    TurnEvent::kQueryIncomplete,    TurnEvent::kTopicSwitchComplete, TurnEvent::kTopicSwitchIncomplete,
    TurnEvent::kClose,
};

// Micro events for a turn starting in `from`. A topic switch only emits
// kTopicSwitch while a request is pending.
std::vector<MicroEvent> expand_turn(SessionState from, TurnEvent e);

// ---------------------------------------------------------------------------
// Supervision.

struct Supervision {
  enum class Decision : std::uint8_t { kProceed, kClarify, kReject };
  Decision decision = Decision::kReject;
  std::vector<std::string> missing;
  std::string reason;
};

// Proceed iff every required parameter is bound; Reject for out_of_scope.
Supervision supervise(const Intent& intent);

// Union of slots, newer values winning. A fragment of a different kind
// replaces the pending intent.
Intent merge_clarification(const Intent& pending, const Intent& fragment);

// ---------------------------------------------------------------------------
// Sessions.

struct SessionOptions {
  int replan_cap = 3;
  bool transparency = true;
  std::size_t memory_budget = 4096;
  SolverConfig solver;

  // Throws InvalidConfigError.
  void validate() const;
};

enum class TimingStage : std::uint8_t {
  kIntentRecognition,
  kInnerSpeech,
  kQueryGeneration,
  kQueryExecution,
  kSolver,
  kQueryExplanation,
  kSolverExplanation,
  kOuterSpeech,
  kTotalTurn,
};

std::string_view timing_stage_name(TimingStage s);

// Stage intervals are disjoint and lie inside TotalTurn, but a stage shorter
// than a nanosecond is reported as one, so the stages of a turn may add up to
// TotalTurn plus kTimingAllowance per stage.
inline constexpr double kTimingAllowance = 1e-9;

struct StageTiming {
  TimingStage stage = TimingStage::kTotalTurn;
  double seconds = 0.0;
};

// Renders notes from "note.*" templates, optionally reworded by a phraser.
class NoteWriter {
 public:
  explicit NoteWriter(const TemplateSet& templates = TemplateSet::builtin(), Phraser* phraser = nullptr)
      : templates_(templates), phraser_(phraser) {}

  std::string render(std::string_view key, const TemplateVars& vars) const;

 private:
  const TemplateSet& templates_;
  Phraser* phraser_;
};

struct TurnDeps {
  KnowledgeStore& store;
  RecognizerBackend& recognizer;
  const Explainer& explainer;
  const NoteWriter& notes;
};

struct TurnOutcome {
  std::uint64_t turn = 0;
  std::string reply;
  IntentKind kind = IntentKind::kOutOfScope;
  ExplanationKind reply_kind = ExplanationKind::kRefusal;
  std::vector<InnerSpeechNote> notes;            // this turn, always recorded
  std::vector<InnerSpeechNote> disclosed_notes;  // empty unless transparency is on
  std::vector<StageTiming> timings;              // executed stages, TotalTurn last
  nlohmann::json plans = nlohmann::json::array();
  SessionState state_after = SessionState::kAwaitingInput;
  bool gave_up = false;
};

class DialogueSession {
 public:
  explicit DialogueSession(std::string id, SessionOptions options = {});

  const std::string& id() const { return id_; }
  const SessionOptions& options() const { return options_; }
  SessionState state() const { return machine_.state; }
  int replans_used() const { return machine_.replans; }
  const std::optional<Intent>& pending() const { return pending_; }
  const std::vector<std::string>& missing() const { return missing_; }
  const ShortTermMemory& memory() const { return memory_; }
  std::uint64_t turns() const { return turn_; }

  // Throws SessionClosedError when closed, std::invalid_argument on blank text.
  TurnOutcome run_turn(std::string_view utterance, const TurnDeps& deps);
  void close();

 private:
  friend class TurnRunner;

  void apply(MicroEvent e);

  std::string id_;
  SessionOptions options_;
  MachineState machine_;
  std::optional<Intent> pending_;
  std::vector<std::string> missing_;
  ShortTermMemory memory_;
  std::uint64_t turn_ = 0;
  std::uint64_t seq_ = 0;
};

// Supervision in the context of a session: merges with the pending request of
// the same kind first. Throws ReplanCapExceededError when the result would be
// a clarification and the session has no replans left.
Supervision supervise(const Intent& intent, const DialogueSession& session);

}  // namespace advisor

#endif  // ADVISOR_INNER_SPEECH_HPP_
