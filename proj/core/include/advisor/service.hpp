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

#ifndef ADVISOR_SERVICE_HPP_
#define ADVISOR_SERVICE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "advisor/explainer.hpp"
#include "advisor/inner_speech.hpp"
#include "advisor/intent.hpp"
#include "advisor/knowledge_store.hpp"
#include "advisor/llm.hpp"

namespace advisor {

struct TurnRecord {
  std::string session_id;
  std::uint64_t turn = 0;
  std::string utterance;
  std::string reply;
  IntentKind intent = IntentKind::kOutOfScope;
  ExplanationKind reply_kind = ExplanationKind::kRefusal;
  SessionState state = SessionState::kAwaitingInput;
  bool gave_up = false;
  std::vector<InnerSpeechNote> disclosed_notes;
  std::vector<StageTiming> timings;
  nlohmann::json plans = nlohmann::json::array();
};

nlohmann::json to_json(const TurnRecord& r, bool with_timings = true);

// Environment:
//   ADVISOR_STORE           snapshot file loaded at start (optional)
//   ADVISOR_BACKEND         "rules" (default; alias "deterministic") or "remote"
//   ADVISOR_REPLAN_CAP      default 3
//   ADVISOR_TRANSPARENCY    "1"/"0", default 1
//   ADVISOR_MAX_DISHES, ADVISOR_THRESHOLD, ADVISOR_MAX_SOLUTIONS
//   ADVISOR_TRANSCRIPT_LOG  append-only JSONL of every turn (optional)
// plus the LlmSettings variables.
struct EngineConfig {
  std::string backend = "rules";
  LlmSettings llm;
  SessionOptions session;
  std::optional<std::filesystem::path> store_path;
  std::optional<std::filesystem::path> transcript_log;

  static EngineConfig from_env();
  void validate() const;
};

// Sessions over a shared store. Turns in one session are serialized: a second
// message while one is running fails with TurnInFlightError instead of
// waiting.
class AdvisorService {
 public:
  // `store` defaults to an empty store, or the snapshot at config.store_path.
  // `transport` overrides the HTTP transport of the remote backend.
  explicit AdvisorService(EngineConfig config, std::shared_ptr<KnowledgeStore> store = nullptr,
                          std::shared_ptr<ChatTransport> transport = nullptr);
  ~AdvisorService();

  AdvisorService(const AdvisorService&) = delete;
  AdvisorService& operator=(const AdvisorService&) = delete;

  std::string create_session(const SessionOptions& options);
  std::string create_session() { return create_session(config_.session); }

  // Throws NotFoundError (unknown or closed), TurnInFlightError and
  // std::invalid_argument (blank text).
  TurnRecord post_message(const std::string& session_id, std::string_view text);
  std::vector<TurnRecord> transcript(const std::string& session_id) const;
  void close_session(const std::string& session_id);

  SessionState session_state(const std::string& session_id) const;
  std::size_t session_count() const;

  KnowledgeStore& store() { return *store_; }
  const EngineConfig& config() const { return config_; }
  std::string backend_identity() const { return recognizer_->identity(); }

 private:
  struct Entry;
  std::shared_ptr<Entry> find(const std::string& id) const;

  EngineConfig config_;
  std::shared_ptr<KnowledgeStore> store_;
  std::shared_ptr<ChatTransport> transport_;
  std::unique_ptr<RecognizerBackend> recognizer_;
  std::unique_ptr<Phraser> inner_phraser_;
  std::unique_ptr<Phraser> outer_phraser_;
  std::unique_ptr<Explainer> explainer_;
  std::unique_ptr<NoteWriter> notes_;

  mutable std::shared_mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_session_ = 1;

  std::mutex log_mu_;
};

}  // namespace advisor

#endif  // ADVISOR_SERVICE_HPP_
