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

// Remote chat-completion plumbing shared by the remote intent backend and the
// remote phrasers for inner and outer speech.

#ifndef ADVISOR_LLM_HPP_
#define ADVISOR_LLM_HPP_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace advisor {

struct ChatMessage {
  std::string role;  // "system", "user", "assistant"
  std::string content;
};

struct ChatRequest {
  std::string model;
  double temperature = 0.0;
  std::vector<ChatMessage> messages;
};

// One round trip to a chat-completion service. Returns the assistant text or
// throws BackendUnavailableError.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

// Settings read from the environment:
//   ADVISOR_LLM_ENDPOINT   base URL of an OpenAI-style API, e.g. https://llm.example.com/v1
//   ADVISOR_LLM_API_KEY    bearer credential
//   ADVISOR_LLM_MODEL      model name
//   ADVISOR_TEMP_INTENT    default 0.0 (intent recognition)
//   ADVISOR_TEMP_INNER     default 0.1 (inner speech notes)
//   ADVISOR_TEMP_OUTER     default 0.25 (outer speech / explanations)
struct LlmSettings {
  std::string endpoint;
  std::string api_key;
  std::string model = "llama3-70b-8192";
  double temperature_intent = 0.0;
  double temperature_inner = 0.1;
  double temperature_outer = 0.25;
  int timeout_seconds = 30;

  static LlmSettings from_env();
};

// POSTs OpenAI-style {model, temperature, messages} to <endpoint>/chat/completions.
class HttpChatTransport final : public ChatTransport {
 public:
  explicit HttpChatTransport(LlmSettings settings);
  std::string complete(const ChatRequest& request) override;

 private:
  LlmSettings settings_;
};

// Rewrites a template draft into more natural wording. Returning nullopt
// keeps the draft.
class Phraser {
 public:
  virtual ~Phraser() = default;
  virtual std::optional<std::string> rephrase(std::string_view purpose, std::string_view draft,
                                              const nlohmann::json& facts) = 0;
};

// Phraser backed by a chat transport. A reply is accepted only when every
// number in it also appears in the draft; otherwise, or when the transport
// fails, the draft is kept.
class LlmPhraser final : public Phraser {
 public:
  LlmPhraser(std::shared_ptr<ChatTransport> transport, std::string model, double temperature);
  std::optional<std::string> rephrase(std::string_view purpose, std::string_view draft,
                                      const nlohmann::json& facts) override;

  double temperature() const { return temperature_; }

 private:
  std::shared_ptr<ChatTransport> transport_;
  std::string model_;
  double temperature_;
};

// Numeric tokens ("12", "-3.5", "450.0") in order of appearance.
std::vector<std::string> numeric_tokens(std::string_view text);

}  // namespace advisor

#endif  // ADVISOR_LLM_HPP_
