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

#include "advisor/service.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "advisor/errors.hpp"

namespace advisor {

using nlohmann::json;

json to_json(const TurnRecord& r, bool with_timings) {
  json j;
  j["session_id"] = r.session_id;
  j["turn"] = r.turn;
  j["utterance"] = r.utterance;
  j["reply"] = r.reply;
  j["intent"] = std::string(intent_kind_name(r.intent));
  j["reply_kind"] = std::string(explanation_kind_name(r.reply_kind));
  j["state"] = std::string(session_state_name(r.state));
  j["gave_up"] = r.gave_up;
  j["disclosed_notes"] = json::array();
  for (const auto& n : r.disclosed_notes) {
    j["disclosed_notes"].push_back(
        {{"stage", std::string(note_stage_name(n.stage))}, {"text", n.text}, {"turn", n.turn}, {"seq", n.seq}});
  }
  if (with_timings) {
    j["timings"] = json::array();
    for (const auto& t : r.timings) {
      j["timings"].push_back({{"stage", std::string(timing_stage_name(t.stage))}, {"seconds", t.seconds}});
    }
  }
  j["plans"] = r.plans;
  return j;
}

namespace {

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? v : nullptr;
}

long long env_int(const char* name, long long fallback) {
  const char* v = env(name);
  if (v == nullptr) return fallback;
  char* end = nullptr;
  const long long n = std::strtoll(v, &end, 10);
  if (*end != '\0') throw InvalidConfigError(fmt::format("{} is not an integer: '{}'", name, v));
  return n;
}

}  // namespace

EngineConfig EngineConfig::from_env() {
  EngineConfig c;
  c.llm = LlmSettings::from_env();
  if (const char* v = env("ADVISOR_BACKEND")) c.backend = std::string_view(v) == "deterministic" ? "rules" : v;
  if (const char* v = env("ADVISOR_STORE")) c.store_path = v;
  if (const char* v = env("ADVISOR_TRANSCRIPT_LOG")) c.transcript_log = v;
  c.session.replan_cap = static_cast<int>(env_int("ADVISOR_REPLAN_CAP", c.session.replan_cap));
  c.session.transparency = env_int("ADVISOR_TRANSPARENCY", 1) != 0;
  c.session.solver.max_dishes = static_cast<int>(env_int("ADVISOR_MAX_DISHES", c.session.solver.max_dishes));
  c.session.solver.max_solutions = static_cast<int>(env_int("ADVISOR_MAX_SOLUTIONS", c.session.solver.max_solutions));
  if (const char* v = env("ADVISOR_THRESHOLD")) {
    char* end = nullptr;
    c.session.solver.threshold = std::strtod(v, &end);
    if (*end != '\0') throw InvalidConfigError(fmt::format("ADVISOR_THRESHOLD is not a number: '{}'", v));
  }
  c.validate();
  return c;
}

void EngineConfig::validate() const {
  if (backend != "rules" && backend != "remote") {
    throw InvalidConfigError(fmt::format("unknown backend '{}' (expected rules, deterministic or remote)", backend));
  }
  session.validate();
}

struct AdvisorService::Entry {
  Entry(std::string id, SessionOptions options) : session(std::move(id), std::move(options)) {}

  std::mutex turn_mu;  // held for the duration of a turn
  DialogueSession session;
  mutable std::mutex records_mu;
  std::vector<TurnRecord> records;
};

AdvisorService::AdvisorService(EngineConfig config, std::shared_ptr<KnowledgeStore> store,
                               std::shared_ptr<ChatTransport> transport)
    : config_(std::move(config)), store_(std::move(store)), transport_(std::move(transport)) {
  config_.validate();
  if (!store_) {
    store_ = config_.store_path ? std::make_shared<KnowledgeStore>(KnowledgeStore::load_snapshot(*config_.store_path))
                                : std::make_shared<KnowledgeStore>();
  }
  if (config_.backend == "remote") {
    if (!transport_) transport_ = std::make_shared<HttpChatTransport>(config_.llm);
    recognizer_ = std::make_unique<RemoteRecognizer>(transport_, config_.llm);
    inner_phraser_ = std::make_unique<LlmPhraser>(transport_, config_.llm.model, config_.llm.temperature_inner);
    outer_phraser_ = std::make_unique<LlmPhraser>(transport_, config_.llm.model, config_.llm.temperature_outer);
  } else {
    recognizer_ = std::make_unique<RuleBasedRecognizer>();
  }
  explainer_ = std::make_unique<Explainer>(TemplateSet::builtin(), outer_phraser_.get());
  notes_ = std::make_unique<NoteWriter>(TemplateSet::builtin(), inner_phraser_.get());
}

AdvisorService::~AdvisorService() = default;

std::string AdvisorService::create_session(const SessionOptions& options) {
  options.validate();
  std::unique_lock lock(sessions_mu_);
  auto id = fmt::format("s{:06d}", next_session_++);
  sessions_.emplace(id, std::make_shared<Entry>(id, options));
  return id;
}

std::shared_ptr<AdvisorService::Entry> AdvisorService::find(const std::string& id) const {
  std::shared_lock lock(sessions_mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError(fmt::format("no session '{}'", id));
  return it->second;
}

TurnRecord AdvisorService::post_message(const std::string& session_id, std::string_view text) {
  const auto entry = find(session_id);
  std::unique_lock turn(entry->turn_mu, std::try_to_lock);
  if (!turn.owns_lock()) throw TurnInFlightError(fmt::format("session '{}' is busy", session_id));
  if (entry->session.state() == SessionState::kClosed) {
    throw NotFoundError(fmt::format("session '{}' is closed", session_id));
  }
  if (canonical_token(text).empty()) throw std::invalid_argument("text is empty");

  const TurnDeps deps{*store_, *recognizer_, *explainer_, *notes_};
  auto outcome = entry->session.run_turn(text, deps);

  TurnRecord r;
  r.session_id = session_id;
  r.turn = outcome.turn;
  r.utterance = std::string(text);
  r.reply = std::move(outcome.reply);
  r.intent = outcome.kind;
  r.reply_kind = outcome.reply_kind;
  r.state = outcome.state_after;
  r.gave_up = outcome.gave_up;
  r.disclosed_notes = std::move(outcome.disclosed_notes);
  r.timings = std::move(outcome.timings);
  r.plans = std::move(outcome.plans);
  {
    std::lock_guard lock(entry->records_mu);
    entry->records.push_back(r);
  }
  if (config_.transcript_log) {
    std::lock_guard lock(log_mu_);
    std::ofstream log(*config_.transcript_log, std::ios::app);
    if (!log) throw IoError(fmt::format("cannot append to '{}'", config_.transcript_log->string()));
    log << to_json(r).dump() << '\n';
  }
  return r;
}

std::vector<TurnRecord> AdvisorService::transcript(const std::string& session_id) const {
  const auto entry = find(session_id);
  std::lock_guard lock(entry->records_mu);
  return entry->records;
}

void AdvisorService::close_session(const std::string& session_id) {
  const auto entry = find(session_id);
  std::unique_lock turn(entry->turn_mu, std::try_to_lock);
  if (!turn.owns_lock()) throw TurnInFlightError(fmt::format("session '{}' is busy", session_id));
  entry->session.close();
}

SessionState AdvisorService::session_state(const std::string& session_id) const {
  const auto entry = find(session_id);
  std::unique_lock turn(entry->turn_mu, std::try_to_lock);
  if (!turn.owns_lock()) return SessionState::kExecuting;
  return entry->session.state();
}

std::size_t AdvisorService::session_count() const {
  std::shared_lock lock(sessions_mu_);
  return sessions_.size();
}

}  // namespace advisor
