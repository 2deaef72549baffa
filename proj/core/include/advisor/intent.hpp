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

#ifndef ADVISOR_INTENT_HPP_
#define ADVISOR_INTENT_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "advisor/llm.hpp"

namespace advisor {

enum class IntentKind : std::uint8_t { kUserInsertion, kDishInfo, kMealPreparation, kOutOfScope };

// "user_insertion", "dish_info", "meal_preparation", "out_of_scope".
std::string_view intent_kind_name(IntentKind k);
std::optional<IntentKind> parse_intent_kind(std::string_view name);
// Human label: "user insertion", ...
std::string_view intent_label(IntentKind k);

// Slot values are kept as the text found in the utterance (lowercased,
// whitespace collapsed). Numbers stay textual until the railguard checks
// them; "allergies" is a ", "-joined list.
using ParamMap = std::map<std::string, std::string>;

struct Intent {
  IntentKind kind = IntentKind::kOutOfScope;
  ParamMap params;
  std::string confidence_note;

  friend bool operator==(const Intent&, const Intent&) = default;
};

struct ParamSpec {
  std::string_view name;
  bool required;
  bool numeric;
};

// Fixed per kind:
//   user_insertion:   name, calories, carbs, proteins, fats, allergies (optional)
//   dish_info:        dish_name, user_name (optional)
//   meal_preparation: user_name
//   out_of_scope:     (none)
std::span<const ParamSpec> param_schema(IntentKind k);
const ParamSpec* find_param(IntentKind k, std::string_view name);

// Required params with no value, in schema order.
std::vector<std::string> missing_params(const Intent& intent);
// Keys are a subset of the schema; out_of_scope carries no params.
bool conforms_to_schema(const Intent& intent);

struct RecognitionContext {
  // Kind of the request awaiting clarification, if any.
  std::optional<IntentKind> pending_kind;
  std::vector<std::string> missing;
  // Short-term memory prompt contribution.
  std::string memory;
};

class RecognizerBackend {
 public:
  virtual ~RecognizerBackend() = default;
  virtual Intent classify(std::string_view utterance, const RecognitionContext& context) = 0;
  // Backend name plus a configuration fingerprint.
  virtual std::string identity() const = 0;
};

// Ordered keyword/regex rule table with slot grammars. Pure: the result
// depends only on (utterance, context).
class RuleBasedRecognizer final : public RecognizerBackend {
 public:
  Intent classify(std::string_view utterance, const RecognitionContext& context) override;
  std::string identity() const override;
};

// Few-shot prompt against a chat endpoint at the intent temperature. The
// reply must be a JSON object {"intent": ..., "params": {...}}; a malformed
// reply is retried once and then becomes out_of_scope. Transport failures
// surface as BackendUnavailableError.
class RemoteRecognizer final : public RecognizerBackend {
 public:
  RemoteRecognizer(std::shared_ptr<ChatTransport> transport, LlmSettings settings);
  Intent classify(std::string_view utterance, const RecognitionContext& context) override;
  std::string identity() const override;

  // The messages sent for one utterance (exposed for inspection).
  std::vector<ChatMessage> build_prompt(std::string_view utterance, const RecognitionContext& context) const;

 private:
  std::shared_ptr<ChatTransport> transport_;
  LlmSettings settings_;
};

// Parses a remote reply; nullopt when malformed or not schema-conformant.
std::optional<Intent> parse_intent_reply(std::string_view reply);

// Drops params whose value does not occur in the normalized utterance or
// context memory.
Intent drop_unsupported_slots(Intent intent, std::string_view utterance, const RecognitionContext& context);

// Demotes to out_of_scope: utterances asking for unsupported operations
// (deleting, updating, ...), non-conforming intents, and numeric slots that
// do not parse as non-negative numbers.
Intent railguard(Intent intent, std::string_view utterance);

// backend.classify, then schema validation and railguard. Throws
// std::invalid_argument on an empty utterance.
Intent classify(RecognizerBackend& backend, std::string_view utterance, const RecognitionContext& context);

// Lowercase, collapse whitespace, unify apostrophes.
std::string normalize_utterance(std::string_view utterance);

}  // namespace advisor

#endif  // ADVISOR_INTENT_HPP_
