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

#include "advisor/inner_speech.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include <fmt/format.h>

#include "advisor/errors.hpp"
#include "advisor/query.hpp"

namespace advisor {

std::string_view note_stage_name(NoteStage s) {
  switch (s) {
    case NoteStage::kIntentReceived:
      return "IntentReceived";
    case NoteStage::kParamsChecked:
      return "ParamsChecked";
    case NoteStage::kClarificationAsked:
      return "ClarificationAsked";
    case NoteStage::kQueryPlanned:
      return "QueryPlanned";
    case NoteStage::kQueryObserved:
      return "QueryObserved";
    case NoteStage::kSolverPlanned:
      return "SolverPlanned";
    case NoteStage::kSolverObserved:
      return "SolverObserved";
    case NoteStage::kConclusion:
      return "Conclusion";
  }
  return "Conclusion";
}

std::string_view session_state_name(SessionState s) {
  switch (s) {
    case SessionState::kAwaitingInput:
      return "AwaitingInput";
    case SessionState::kAwaitingClarification:
      return "AwaitingClarification";
    case SessionState::kExecuting:
      return "Executing";
    case SessionState::kClosed:
      return "Closed";
  }
  return "Closed";
}

std::string_view timing_stage_name(TimingStage s) {
  switch (s) {
    case TimingStage::kIntentRecognition:
      return "IntentRecognition";
    case TimingStage::kInnerSpeech:
      return "InnerSpeech";
    case TimingStage::kQueryGeneration:
      return "QueryGeneration";
    case TimingStage::kQueryExecution:
      return "QueryExecution";
    case TimingStage::kSolver:
      return "Solver";
    case TimingStage::kQueryExplanation:
      return "QueryExplanation";
    case TimingStage::kSolverExplanation:
      return "SolverExplanation";
    case TimingStage::kOuterSpeech:
      return "OuterSpeech";
    case TimingStage::kTotalTurn:
      return "TotalTurn";
  }
  return "TotalTurn";
}

// --- memory ---------------------------------------------------------------

std::string ShortTermMemory::fragment_text(const InnerSpeechNote& note) {
  return fmt::format("[{}] {}\n", note_stage_name(note.stage), note.text);
}

void ShortTermMemory::append(InnerSpeechNote note) {
  chars_ += fragment_text(note).size();
  fragments_.push_back(std::move(note));
  while (chars_ > budget_ && fragments_.size() > 1) {
    chars_ -= fragment_text(fragments_.front()).size();
    fragments_.pop_front();
    ++dropped_;
  }
}

std::string ShortTermMemory::prompt() const {
  std::string out;
  out.reserve(chars_);
  for (const auto& f : fragments_) out += fragment_text(f);
  return out;
}

// --- transition table -----------------------------------------------------

std::optional<MachineState> step(MachineState s, MicroEvent e, int replan_cap) {
  const auto clarify = [&]() -> MachineState {
    if (s.replans < replan_cap) return {SessionState::kAwaitingClarification, s.replans + 1};
    return {SessionState::kAwaitingInput, 0};
  };
  switch (s.state) {
    case SessionState::kAwaitingInput:
      switch (e) {
        case MicroEvent::kProceed:
          return MachineState{SessionState::kExecuting, s.replans};
        case MicroEvent::kClarify:
          return clarify();
        case MicroEvent::kReject:
          return MachineState{SessionState::kAwaitingInput, 0};
        case MicroEvent::kClose:
          return MachineState{SessionState::kClosed, s.replans};
        default:
          return std::nullopt;
      }
    case SessionState::kAwaitingClarification:
      switch (e) {
        case MicroEvent::kProceed:
          return MachineState{SessionState::kExecuting, s.replans};
        case MicroEvent::kClarify:
        case MicroEvent::kReject:
          return clarify();
        case MicroEvent::kTopicSwitch:
          return MachineState{SessionState::kAwaitingInput, 0};
        case MicroEvent::kClose:
          return MachineState{SessionState::kClosed, s.replans};
        default:
          return std::nullopt;
      }
    case SessionState::kExecuting:
      switch (e) {
        case MicroEvent::kExecutionDone:
          return MachineState{SessionState::kAwaitingInput, 0};
        case MicroEvent::kExecutionIncomplete:
          return clarify();
        default:
          return std::nullopt;
      }
    case SessionState::kClosed:
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<MicroEvent> expand_turn(SessionState from, TurnEvent e) {
  if (from == SessionState::kClosed) return {};
  const bool pending = from == SessionState::kAwaitingClarification;
  switch (e) {
    case TurnEvent::kComplete:
      return {MicroEvent::kProceed, MicroEvent::kExecutionDone};
    case TurnEvent::kIncomplete:
      return {MicroEvent::kClarify};
    case TurnEvent::kOutOfScope:
      return {MicroEvent::kReject};
    case TurnEvent::kQueryIncomplete:
      return {MicroEvent::kProceed, MicroEvent::kExecutionIncomplete};
    case TurnEvent::kTopicSwitchComplete:
      if (pending) return {MicroEvent::kTopicSwitch, MicroEvent::kProceed, MicroEvent::kExecutionDone};
      return {MicroEvent::kProceed, MicroEvent::kExecutionDone};
    case TurnEvent::kTopicSwitchIncomplete:
      if (pending) return {MicroEvent::kTopicSwitch, MicroEvent::kClarify};
      return {MicroEvent::kClarify};
    case TurnEvent::kClose:
      return {MicroEvent::kClose};
  }
  return {};
}

// --- supervision ----------------------------------------------------------

Supervision supervise(const Intent& intent) {
  Supervision s;
  if (intent.kind == IntentKind::kOutOfScope) {
    s.decision = Supervision::Decision::kReject;
    s.reason = intent.confidence_note.empty() ? "out of scope" : intent.confidence_note;
    return s;
  }
  s.missing = missing_params(intent);
  s.decision = s.missing.empty() ? Supervision::Decision::kProceed : Supervision::Decision::kClarify;
  return s;
}

Intent merge_clarification(const Intent& pending, const Intent& fragment) {
  if (fragment.kind != pending.kind) return fragment;
  Intent merged = pending;
  for (const auto& [k, v] : fragment.params) merged.params[k] = v;
  merged.confidence_note = fragment.confidence_note;
  return merged;
}

Supervision supervise(const Intent& intent, const DialogueSession& session) {
  if (session.state() == SessionState::kClosed) throw SessionClosedError("session is closed");
  const auto& pending = session.pending();
  const auto merged = pending && pending->kind == intent.kind ? merge_clarification(*pending, intent) : intent;
  auto s = supervise(merged);
  if (s.decision == Supervision::Decision::kClarify) {
    // A topic switch starts with a fresh counter.
    const bool fresh = !pending || pending->kind != intent.kind;
    const int used = fresh ? 0 : session.replans_used();
    if (used >= session.options().replan_cap) {
      throw ReplanCapExceededError(fmt::format("replan cap of {} reached", session.options().replan_cap));
    }
  }
  return s;
}

void SessionOptions::validate() const {
  if (replan_cap < 1) throw InvalidConfigError("replan_cap must be at least 1");
  if (memory_budget < 1) throw InvalidConfigError("memory_budget must be positive");
  solver.validate();
}

std::string NoteWriter::render(std::string_view key, const TemplateVars& vars) const {
  auto text = templates_.render(key, vars);
  if (phraser_ != nullptr) {
    nlohmann::json facts = nlohmann::json::object();
    for (const auto& [k, v] : vars) facts[k] = v;
    if (auto better = phraser_->rephrase("inner speech note", text, facts)) text = std::move(*better);
  }
  return text;
}

// --- sessions -------------------------------------------------------------

DialogueSession::DialogueSession(std::string id, SessionOptions options)
    : id_(std::move(id)), options_(std::move(options)), memory_(options_.memory_budget) {
  options_.validate();
}

void DialogueSession::apply(MicroEvent e) {
  const auto next = step(machine_, e, options_.replan_cap);
  if (!next) {
    throw InternalError(fmt::format("undefined transition from {}", session_state_name(machine_.state)));
  }
  machine_ = *next;
}

void DialogueSession::close() {
  if (machine_.state == SessionState::kClosed) return;
  if (machine_.state == SessionState::kExecuting) throw TurnInFlightError("a turn is executing");
  apply(MicroEvent::kClose);
  pending_.reset();
  missing_.clear();
}

namespace {

using Clock = std::chrono::steady_clock;

std::string bound_summary(const Intent& intent) {
  std::vector<std::string> parts;
  for (const auto& [k, v] : intent.params) parts.push_back(fmt::format("{}={}", k, v));
  return parts.empty() ? std::string("nothing") : join_list(parts, ", ");
}

std::string nutrient_var(const Nutrients& n, Nutrient k) { return format_tenths(n.tenths(k)); }

void put_nutrients(TemplateVars& vars, const Nutrients& n) {
  for (const auto k : kAllNutrients) vars[std::string(nutrient_name(k))] = nutrient_var(n, k);
}

std::string allergen_list(const AllergenSet& s) {
  std::vector<std::string> names;
  for (const auto& a : s) names.push_back(a.name());
  return names.empty() ? std::string("none") : join_list(names);
}

}  // namespace

class TurnRunner {
 public:
  TurnRunner(DialogueSession& session, const TurnDeps& deps, std::string_view utterance)
      : s_(session), deps_(deps), utterance_(utterance) {}

  TurnOutcome run();

 private:
  static constexpr std::size_t kStages = static_cast<std::size_t>(TimingStage::kTotalTurn);

  // Stages shorter than one clock tick are reported as one nanosecond.
  static double seconds(Clock::duration d) {
    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(d).count();
    return static_cast<double>(std::max<std::int64_t>(ns, 1)) * 1e-9;
  }

  template <typename F>
  auto timed(TimingStage stage, F&& f) {
    const auto i = static_cast<std::size_t>(stage);
    ran_[i] = true;
    const auto t0 = Clock::now();
    struct Guard {
      Clock::duration& slot;
      Clock::time_point t0;
      ~Guard() { slot += Clock::now() - t0; }
    } guard{spent_[i], t0};
    return f();
  }

  void note(NoteStage stage, std::string_view key, TemplateVars vars) {
    timed(TimingStage::kInnerSpeech, [&] {
      InnerSpeechNote n;
      n.stage = stage;
      n.text = deps_.notes.render(key, vars);
      n.turn = out_.turn;
      n.seq = ++s_.seq_;
      s_.memory_.append(n);
      out_.notes.push_back(std::move(n));
      return 0;
    });
  }

  void say(const Explanation& e) {
    out_.reply_kind = e.kind;
    if (!out_.reply.empty()) out_.reply += "\n";
    out_.reply += e.text;
  }

  void reset_pending() {
    s_.pending_.reset();
    s_.missing_.clear();
  }

  TemplateVars label_vars(IntentKind k) const { return {{"label", std::string(intent_label(k))}}; }

  void give_up(IntentKind kind) {
    out_.gave_up = true;
    const int cap = s_.options_.replan_cap;
    auto vars = label_vars(kind);
    vars["cap"] = std::to_string(cap);
    note(NoteStage::kConclusion, "note.conclusion_give_up", vars);
    say(timed(TimingStage::kOuterSpeech, [&] { return deps_.explainer.give_up(kind, cap); }));
    reset_pending();
  }

  // Clarification after supervision. `prefix` is prepended to the question.
  void clarify(const Intent& merged, const std::vector<std::string>& missing, std::string_view prefix_key) {
    const bool exhausted = s_.machine_.replans >= s_.options_.replan_cap;
    s_.apply(MicroEvent::kClarify);
    if (exhausted) {
      give_up(merged.kind);
      return;
    }
    s_.pending_ = merged;
    s_.missing_ = missing;
    const auto missing_text = join_list(missing);
    auto vars = label_vars(merged.kind);
    vars["missing"] = missing_text;
    vars["replans"] = std::to_string(s_.machine_.replans);
    vars["cap"] = std::to_string(s_.options_.replan_cap);
    note(NoteStage::kClarificationAsked, "note.clarification_asked", vars);
    note(NoteStage::kConclusion, "note.conclusion_clarify", vars);
    timed(TimingStage::kOuterSpeech, [&] {
      auto q = deps_.explainer.ask_clarification(missing, merged.kind);
      if (!prefix_key.empty()) q.text = deps_.explainer.templates().render(prefix_key) + " " + q.text;
      say(q);
      return 0;
    });
  }

  void handle_out_of_scope() {
    if (s_.machine_.state == SessionState::kAwaitingClarification && s_.pending_) {
      auto vars = label_vars(s_.pending_->kind);
      vars["missing"] = join_list(s_.missing_);
      note(NoteStage::kParamsChecked, "note.params_unusable", vars);
      const auto pending = *s_.pending_;
      const auto missing = s_.missing_;
      clarify(pending, missing, "reply.reask");
      return;
    }
    note(NoteStage::kParamsChecked, "note.params_rejected", {});
    s_.apply(MicroEvent::kReject);
    reset_pending();
    note(NoteStage::kConclusion, "note.conclusion_refused", {});
    say(timed(TimingStage::kOuterSpeech, [&] { return deps_.explainer.refuse_out_of_scope(utterance_); }));
  }

  void handle_request(const Intent& intent) {
    const bool awaiting = s_.machine_.state == SessionState::kAwaitingClarification && s_.pending_;
    Intent merged = intent;
    std::string context;
    if (awaiting && s_.pending_->kind == intent.kind) {
      merged = merge_clarification(*s_.pending_, intent);
      context = deps_.notes.render("note.context_merged", label_vars(intent.kind));
    } else if (awaiting) {
      auto vars = label_vars(intent.kind);
      vars["old"] = std::string(intent_label(s_.pending_->kind));
      context = deps_.notes.render("note.context_switch", vars);
      s_.apply(MicroEvent::kTopicSwitch);
      reset_pending();
    } else {
      context = deps_.notes.render("note.context_new", label_vars(intent.kind));
    }

    const auto sup = timed(TimingStage::kInnerSpeech, [&] { return supervise(merged); });
    TemplateVars vars{{"context", context}, {"bound", bound_summary(merged)}, {"missing", join_list(sup.missing)}};
    if (sup.decision == Supervision::Decision::kClarify) {
      note(NoteStage::kParamsChecked, "note.params_missing", vars);
      clarify(merged, sup.missing, "");
      return;
    }
    note(NoteStage::kParamsChecked, "note.params_complete", vars);
    s_.apply(MicroEvent::kProceed);
    execute(merged);
  }

  // Replanning after a query came back incomplete: forget `drop`, ask again.
  void replan(Intent merged, const std::vector<std::string>& drop, const Explanation& why) {
    for (const auto& k : drop) merged.params.erase(k);
    const bool exhausted = s_.machine_.replans >= s_.options_.replan_cap;
    s_.apply(MicroEvent::kExecutionIncomplete);
    say(why);
    if (exhausted) {
      give_up(merged.kind);
      return;
    }
    s_.pending_ = merged;
    s_.missing_ = missing_params(merged);
    auto vars = label_vars(merged.kind);
    vars["missing"] = join_list(s_.missing_);
    vars["replans"] = std::to_string(s_.machine_.replans);
    vars["cap"] = std::to_string(s_.options_.replan_cap);
    note(NoteStage::kConclusion, "note.conclusion_replan", vars);
    say(timed(TimingStage::kOuterSpeech, [&] { return deps_.explainer.ask_clarification(s_.missing_, merged.kind); }));
  }

  void done() {
    s_.apply(MicroEvent::kExecutionDone);
    reset_pending();
  }

  void execute(const Intent& merged) {
    const auto queries = timed(TimingStage::kQueryGeneration, [&] { return compile(merged); });
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const auto text = timed(TimingStage::kQueryGeneration, [&] { return render_query_text(queries[i]); });
      note(NoteStage::kQueryPlanned, "note.query_planned",
           {{"index", std::to_string(i + 1)}, {"count", std::to_string(queries.size())}, {"query", text}});
    }
    std::vector<QueryResult> results;
    for (const auto& q : queries) {
      results.push_back(timed(TimingStage::kQueryExecution, [&] { return execute_query(q); }));
      observe(results.back(), merged);
      // A missing user only matters to dish information as an optional extra.
      const bool optional = merged.kind == IntentKind::kDishInfo && q.kind == QueryKind::kFetchUserNeeds;
      if (results.back().incomplete() && !optional) break;
    }
    switch (merged.kind) {
      case IntentKind::kDishInfo:
        finish_dish_info(merged, queries, results);
        return;
      case IntentKind::kMealPreparation:
        finish_meal(merged, queries, results);
        return;
      case IntentKind::kUserInsertion:
        finish_insertion(merged, queries, results);
        return;
      case IntentKind::kOutOfScope:
        break;
    }
    throw InternalError("out_of_scope request reached execution");
  }

  QueryResult execute_query(const QueryIR& q) { return advisor::execute(q, deps_.store); }

  void observe(const QueryResult& r, const Intent& merged) {
    TemplateVars vars;
    const auto& q = r.source_query;
    const auto binding = [&](const char* name) {
      const auto it = q.bindings.find(name);
      return it == q.bindings.end() ? std::string() : std::get<std::string>(it->second);
    };
    switch (q.kind) {
      case QueryKind::kFetchDish:
        if (r.incomplete()) {
          note(NoteStage::kQueryObserved, "note.query_missing_dish", {{"dish", binding("dish_name")}});
        } else {
          const auto& d = r.dishes.front();
          vars["dish"] = d.name;
          put_nutrients(vars, d.nutrients);
          vars["allergens"] = allergen_list(d.allergens);
          note(NoteStage::kQueryObserved, "note.query_ok_dish", vars);
        }
        return;
      case QueryKind::kFetchUserNeeds:
      case QueryKind::kFilterSafeDishes:
        if (r.incomplete()) {
          const bool optional = merged.kind == IntentKind::kDishInfo;
          note(NoteStage::kQueryObserved, optional ? "note.query_missing_user_optional" : "note.query_missing_user",
               {{"user", binding("user_name")}});
        } else if (q.kind == QueryKind::kFetchUserNeeds) {
          const auto& u = r.users.front();
          vars["user"] = u.name;
          put_nutrients(vars, u.needs);
          vars["allergies"] = allergen_list(u.allergies);
          note(NoteStage::kQueryObserved, "note.query_ok_user", vars);
        } else {
          const auto& u = r.users.front();
          note(NoteStage::kQueryObserved, "note.query_ok_filter",
               {{"user", u.name},
                {"kept", std::to_string(r.dishes.size())},
                {"total", std::to_string(r.scanned)},
                {"allergies", allergen_list(u.allergies)}});
        }
        return;
      case QueryKind::kCreateUser:
        if (r.incomplete()) {
          note(NoteStage::kQueryObserved, "note.query_rejected", {{"user", binding("name")}, {"detail", r.detail}});
        } else {
          note(NoteStage::kQueryObserved, "note.query_ok_created",
               {{"user", binding("name")}, {"id", std::to_string(r.created->value)}});
        }
        return;
    }
  }

  Explanation explain(const QueryResult& r, TimingStage stage = TimingStage::kQueryExplanation) {
    return timed(stage, [&] { return deps_.explainer.explain_query(r.source_query, r); });
  }

  void finish_dish_info(const Intent& merged, const std::vector<QueryIR>&, const std::vector<QueryResult>& results) {
    const auto& dish = results.front();
    if (dish.incomplete()) {
      replan(merged, {"dish_name"}, explain(dish));
      return;
    }
    const auto& d = dish.dishes.front();
    const auto found = explain(dish);
    say(found);
    TemplateVars vars{{"dish", d.name}};
    if (results.size() > 1) {
      const auto& user = results[1];
      if (user.incomplete()) {
        say(explain(user));
        note(NoteStage::kConclusion, "note.conclusion_dish", vars);
      } else {
        say(timed(TimingStage::kQueryExplanation, [&] { return deps_.explainer.allergen_check(d, user.users.front()); }));
        vars["user"] = user.users.front().name;
        note(NoteStage::kConclusion, "note.conclusion_dish_user", vars);
      }
    } else {
      note(NoteStage::kConclusion, "note.conclusion_dish", vars);
    }
    out_.reply_kind = ExplanationKind::kQueryExplanation;
    done();
  }

  void finish_meal(const Intent& merged, const std::vector<QueryIR>&, const std::vector<QueryResult>& results) {
    const auto failed = std::find_if(results.begin(), results.end(), [](const auto& r) { return r.incomplete(); });
    if (failed != results.end()) {
      replan(merged, {"user_name"}, explain(*failed));
      return;
    }
    const auto& user = results.front().users.front();
    const auto& filter = results.back();
    const auto& cfg = s_.options_.solver;
    const auto threshold = format_tenths(cfg.threshold_ppm() / 1000);
    note(NoteStage::kSolverPlanned, "note.solver_planned",
         {{"max_dishes", std::to_string(cfg.max_dishes)},
          {"candidates", std::to_string(filter.dishes.size())},
          {"threshold", threshold}});
    const auto report = timed(TimingStage::kSolver, [&] { return solve(filter.dishes, user.needs, cfg); });
    say(explain(filter));
    if (report.status == SolveStatus::kNoFeasibleSolution) {
      note(NoteStage::kSolverObserved, "note.solver_none",
           {{"threshold", threshold}, {"explored", std::to_string(report.explored_nodes)}});
      note(NoteStage::kConclusion, "note.conclusion_no_meal", {{"user", user.name}});
      say(timed(TimingStage::kSolverExplanation,
                [&] { return deps_.explainer.explain_no_solution(user.name, filter.dishes.size(), cfg); }));
      done();
      return;
    }
    const auto& best = report.solutions.front();
    const auto best_text = join_list(best.dish_names);
    note(NoteStage::kSolverObserved, "note.solver_found",
         {{"count", std::to_string(report.solutions.size())},
          {"explored", std::to_string(report.explored_nodes)},
          {"pruned", std::to_string(report.pruned_nodes)},
          {"best", best_text},
          {"score", fmt::format("{:.4f}", best.score().value())}});
    note(NoteStage::kConclusion, "note.conclusion_meal",
         {{"count", std::to_string(report.solutions.size())}, {"user", user.name}, {"best", best_text}});
    const auto e = timed(TimingStage::kSolverExplanation,
                         [&] { return deps_.explainer.explain_solution(report, user.needs, user.name); });
    out_.plans = e.structured["plans"];
    say(e);
    done();
  }

  void finish_insertion(const Intent& merged, const std::vector<QueryIR>& queries,
                        const std::vector<QueryResult>& results) {
    const auto& r = results.front();
    const auto e = explain(r);
    if (r.incomplete()) {
      std::vector<std::string> drop;
      const auto& needs = std::get<Nutrients>(queries.front().bindings.at("needs"));
      for (const auto k : kAllNutrients) {
        if (needs.tenths(k) <= 0) drop.emplace_back(nutrient_name(k));
      }
      if (drop.empty()) drop.emplace_back("name");
      replan(merged, drop, e);
      return;
    }
    note(NoteStage::kConclusion, "note.conclusion_created", {{"user", r.users.front().name}});
    say(e);
    done();
  }

  DialogueSession& s_;
  const TurnDeps& deps_;
  std::string_view utterance_;
  TurnOutcome out_;
  std::array<Clock::duration, kStages> spent_{};
  std::array<bool, kStages> ran_{};
};

TurnOutcome TurnRunner::run() {
  const auto start = Clock::now();
  // Committed once recognition succeeds.
  out_.turn = s_.turn_ + 1;
  RecognitionContext ctx;
  if (s_.machine_.state == SessionState::kAwaitingClarification && s_.pending_) {
    ctx.pending_kind = s_.pending_->kind;
    ctx.missing = s_.missing_;
  }
  ctx.memory = s_.memory_.prompt();
  const auto intent = timed(TimingStage::kIntentRecognition,
                            [&] { return classify(deps_.recognizer, utterance_, ctx); });
  s_.turn_ = out_.turn;
  out_.kind = intent.kind;
  note(NoteStage::kIntentReceived, "note.intent_received",
       {{"utterance", std::string(utterance_)}, {"label", std::string(intent_label(intent.kind))}});

  if (intent.kind == IntentKind::kOutOfScope) {
    handle_out_of_scope();
  } else {
    handle_request(intent);
  }

  out_.state_after = s_.machine_.state;
  if (s_.options_.transparency) out_.disclosed_notes = out_.notes;
  for (std::size_t i = 0; i < spent_.size(); ++i) {
    if (ran_[i]) out_.timings.push_back({static_cast<TimingStage>(i), seconds(spent_[i])});
  }
  out_.timings.push_back({TimingStage::kTotalTurn, seconds(Clock::now() - start)});
  return std::move(out_);
}

TurnOutcome DialogueSession::run_turn(std::string_view utterance, const TurnDeps& deps) {
  if (machine_.state == SessionState::kClosed) throw SessionClosedError(fmt::format("session {} is closed", id_));
  if (canonical_token(utterance).empty()) throw std::invalid_argument("utterance is empty");
  if (machine_.state == SessionState::kExecuting) throw TurnInFlightError("a turn is already executing");
  try {
    return TurnRunner(*this, deps, utterance).run();
  } catch (...) {
    // Never leave the session in Executing.
    if (machine_.state == SessionState::kExecuting) {
      machine_ = {SessionState::kAwaitingInput, 0};
      pending_.reset();
      missing_.clear();
    }
    throw;
  }
}

}  // namespace advisor
