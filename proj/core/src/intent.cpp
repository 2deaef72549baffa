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

#include "advisor/intent.hpp"

#include <algorithm>
#include <array>
#include <regex>
#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "advisor/domain.hpp"
#include "advisor/errors.hpp"
#include "advisor/templates.hpp"

namespace advisor {

namespace {

constexpr std::array<ParamSpec, 6> kUserInsertionSchema = {{
    {"name", true, false},
    {"calories", true, true},
    {"carbs", true, true},
    {"proteins", true, true},
    {"fats", true, true},
    {"allergies", false, false},
}};
constexpr std::array<ParamSpec, 2> kDishInfoSchema = {{{"dish_name", true, false}, {"user_name", false, false}}};
constexpr std::array<ParamSpec, 1> kMealPreparationSchema = {{{"user_name", true, false}}};

}  // namespace

std::string_view intent_kind_name(IntentKind k) {
  switch (k) {
    case IntentKind::kUserInsertion:
      return "user_insertion";
    case IntentKind::kDishInfo:
      return "dish_info";
    case IntentKind::kMealPreparation:
      return "meal_preparation";
    case IntentKind::kOutOfScope:
      return "out_of_scope";
  }
  return "out_of_scope";
}

std::optional<IntentKind> parse_intent_kind(std::string_view name) {
  for (const auto k : {IntentKind::kUserInsertion, IntentKind::kDishInfo, IntentKind::kMealPreparation,
                       IntentKind::kOutOfScope}) {
    if (intent_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view intent_label(IntentKind k) {
  switch (k) {
    case IntentKind::kUserInsertion:
      return "user insertion";
    case IntentKind::kDishInfo:
      return "dish information";
    case IntentKind::kMealPreparation:
      return "meal preparation";
    case IntentKind::kOutOfScope:
      return "out of scope";
  }
  return "out of scope";
}

std::span<const ParamSpec> param_schema(IntentKind k) {
  switch (k) {
    case IntentKind::kUserInsertion:
      return kUserInsertionSchema;
    case IntentKind::kDishInfo:
      return kDishInfoSchema;
    case IntentKind::kMealPreparation:
      return kMealPreparationSchema;
    case IntentKind::kOutOfScope:
      return {};
  }
  return {};
}

const ParamSpec* find_param(IntentKind k, std::string_view name) {
  for (const auto& p : param_schema(k)) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::vector<std::string> missing_params(const Intent& intent) {
  std::vector<std::string> out;
  for (const auto& p : param_schema(intent.kind)) {
    if (!p.required) continue;
    const auto it = intent.params.find(std::string(p.name));
    if (it == intent.params.end() || it->second.empty()) out.emplace_back(p.name);
  }
  return out;
}

bool conforms_to_schema(const Intent& intent) {
  if (intent.kind == IntentKind::kOutOfScope) return intent.params.empty();
  return std::all_of(intent.params.begin(), intent.params.end(),
                     [&](const auto& kv) { return find_param(intent.kind, kv.first) != nullptr; });
}

std::string normalize_utterance(std::string_view utterance) {
  std::string s;
  s.reserve(utterance.size());
  for (std::size_t i = 0; i < utterance.size(); ++i) {
    // U+2019 RIGHT SINGLE QUOTATION MARK -> '
    if (i + 2 < utterance.size() && static_cast<unsigned char>(utterance[i]) == 0xE2 &&
        static_cast<unsigned char>(utterance[i + 1]) == 0x80 && static_cast<unsigned char>(utterance[i + 2]) == 0x99) {
      s.push_back('\'');
      i += 2;
      continue;
    }
    s.push_back(utterance[i]);
  }
  return canonical_token(s);
}

// ---------------------------------------------------------------------------
// Rule-based backend.

namespace {

using std::regex;
using std::smatch;

const std::set<std::string, std::less<>>& stop_words() {
  static const std::set<std::string, std::less<>> words = {
      "a",      "an",     "and",     "as",        "called",   "named",    "with",     "who",     "that",
      "is",     "for",    "to",      "the",       "please",   "profile",  "user",     "needs",   "need",
      "allergic", "has",  "have",    "me",        "us",       "him",      "her",      "them",    "my",
      "lunch",  "dinner", "breakfast", "supper",  "today",    "tonight",  "tomorrow", "someone", "everyone",
      "somebody", "you",  "it",      "this",      "that",     "meal",     "menu",     "plan",    "new",
      "patient", "person", "client", "wants",     "want",     "calories", "kcal",     "carbs",   "proteins",
      "fats",   "protein", "fat",    "weather",   "what",     "how",      "who",      "why",     "when",
      "where",  "can",    "could",   "should",    "would",    "do",       "does",     "i",       "we",
      "hello",  "hi",     "yes",     "no",        "ok",       "okay",     "thanks",   "thank",   "sure",
      "dish",   "food",   "something", "anything", "tell",     "joke",     "time",     "music",   "play",
      "allergies", "but", "or",      "not",       "he",       "she",      "they",     "in",      "on",
      "of",     "at",     "by",      "from",      "about"};
  return words;
}

bool is_stop(std::string_view w) { return stop_words().contains(w); }

const std::set<std::string, std::less<>>& generic_dish_words() {
  static const std::set<std::string, std::less<>> words = {"dish",  "a dish", "food", "meal", "something",
                                                          "it",    "this",   "that", "one",  "anything",
                                                          "dishes"};
  return words;
}

std::string trim_copy(std::string s) {
  const auto b = s.find_first_not_of(" ,;:");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" ,;:");
  return s.substr(b, e - b + 1);
}

// Trailing punctuation and politeness.
std::string strip_tail(std::string s) {
  static const regex tail(R"((?:[?.!,;]+|\s+please|\s+thanks|\s+thank you)+$)");
  s = std::regex_replace(s, tail, "");
  return trim_copy(std::move(s));
}

std::string strip_article(std::string s) {
  static const regex lead(R"(^(?:the|a|an|some|your)\s+)");
  return std::regex_replace(s, lead, "");
}

const regex kDeny(R"(\b(?:delete|remove|erase|drop|update|modify|edit|rename|change|cancel|unsubscribe)\b)");

// --- triggers -------------------------------------------------------------

const regex kUserTrigger1(
    R"(\b(?:add|insert|register|create|enroll|save|store)\b[^.?!]*?\b(?:user|profile|patient|person|client)\b)");
const regex kUserTrigger2(R"(\bnew (?:user|profile|patient|client)\b)");
const regex kUserTrigger3(R"(\bmy name is\b)");

const regex kMealTrigger1(
    R"(\b(?:prepare|plan|make|suggest|recommend|compose|create|cook|build|organize|propose|need|want|give)\b[^.?!]*?\b(?:meal|menu|lunch|dinner|breakfast|supper)s?\b)");
const regex kMealTrigger2(R"(\b(?:what|which)\s+(?:should|can|could)\s+[a-z'-]+\s+(?:eat|have)\b)");
const regex kMealTrigger3(R"(\bmeal plan\b)");

// DishInfo patterns double as triggers; the capture groups carry slots.
struct DishPattern {
  regex re;
  int dish_group;
  int user_group;  // 0 when absent
};

const std::vector<DishPattern>& dish_patterns() {
  static const std::vector<DishPattern> patterns = {
      {regex(R"(\bis\s+(?:the\s+|a\s+|an\s+)?(.+?)\s+(?:safe|ok|okay|suitable)\s+for\s+([a-z][a-z'-]*))"), 1, 2},
      {regex(R"(\bcan\s+([a-z][a-z'-]*)\s+eat\s+(.+)$)"), 2, 1},
      {regex(R"(\bhow many calories\s+(?:are\s+|does\s+|is\s+)?(?:there\s+)?(?:in\s+)?(.+?)(?:\s+(?:have|has|contain|contains))?[?.!]*$)"), 1, 0},
      {regex(R"(\bwhat(?:'s| is| are)\s+(?:the\s+)?(?:(?:allergens|ingredients|nutrients|nutritional values?|calories|macros)\s+)?(?:in|of)\s+(.+)$)"), 1, 0},
      {regex(R"(\bdoes\s+(.+?)\s+contain\b)"), 1, 0},
      {regex(R"(\btell me about\s+(.+)$)"), 1, 0},
      {regex(R"(\b(?:information|info|details|nutrition(?:al)?(?:\s+(?:information|info|values?|facts|data|content))?|allergens|ingredients|macros)\s+(?:on|about|of|for|in)\s+(.+)$)"), 1, 0},
  };
  return patterns;
}

// --- slot grammars --------------------------------------------------------

std::optional<std::string> first_name_match(const std::string& text, const regex& re, int group = 1) {
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
    auto w = (*it)[group].str();
    if (!w.empty() && !is_stop(w)) return w;
  }
  return std::nullopt;
}

std::optional<std::string> user_insertion_name(const std::string& u) {
  static const std::array<regex, 4> patterns = {
      regex(R"(\b(?:called|named)\s+([a-z][a-z'-]*))"),
      regex(R"(\bname is\s+([a-z][a-z'-]*))"),
      regex(R"(\b(?:register|add|insert|enroll|create)\s+([a-z][a-z'-]*)\s+as\b)"),
      regex(R"(\b(?:user|patient|person|profile|client)\s+(?:for\s+)?([a-z][a-z'-]*))"),
  };
  for (const auto& re : patterns) {
    if (auto n = first_name_match(u, re)) return n;
  }
  return std::nullopt;
}

std::optional<std::string> meal_user_name(const std::string& u) {
  static const std::array<regex, 3> patterns = {
      regex(R"(\b(?:what|which)\s+(?:should|can|could)\s+([a-z][a-z'-]*)\s+(?:eat|have)\b)"),
      regex(R"(\b([a-z][a-z-]*)'s\s+(?:meal|lunch|dinner|breakfast|menu|supper)\b)"),
      regex(R"(\bfor\s+([a-z][a-z'-]*))"),
  };
  for (const auto& re : patterns) {
    if (auto n = first_name_match(u, re)) return n;
  }
  return std::nullopt;
}

// A lone name, possibly prefixed ("for anna", "it's anna").
std::optional<std::string> bare_name(const std::string& u) {
  static const regex re(R"(^(?:(?:it's|it is|for|the name is|name is|name|her name is|his name is|call (?:her|him|them))\s*:?\s+)?([a-z][a-z'-]*)[.!]*$)");
  smatch m;
  if (std::regex_match(u, m, re) && !is_stop(m[1].str())) return m[1].str();
  return std::nullopt;
}

// A short noun phrase with no question word, used as a dish name.
std::optional<std::string> bare_dish(const std::string& u) {
  static const regex re(R"(^(?:(?:it's|it is|i mean|i meant)\s+)?([a-z][a-z' -]*?)[.!]*$)");
  smatch m;
  if (!std::regex_match(u, m, re)) return std::nullopt;
  auto phrase = strip_article(trim_copy(m[1].str()));
  const auto words = std::count(phrase.begin(), phrase.end(), ' ') + 1;
  if (phrase.empty() || words > 4) return std::nullopt;
  const auto first = phrase.substr(0, phrase.find(' '));
  if (is_stop(first) || generic_dish_words().contains(phrase)) return std::nullopt;
  return phrase;
}

struct NutrientWords {
  const char* slot;
  const char* words;
};

constexpr std::array<NutrientWords, 4> kNutrientWords = {{
    {"calories", "kcal|calories|calorie|cal"},
    {"carbs", "carbohydrates|carbohydrate|carbs|carb"},
    {"proteins", "proteins|protein"},
    {"fats", "fats|fat"},
}};

struct NutrientPatterns {
  const char* slot;
  regex before;
  regex after;
  regex textual;
};

const std::vector<NutrientPatterns>& nutrient_patterns() {
  static const std::vector<NutrientPatterns> patterns = [] {
    std::vector<NutrientPatterns> out;
    for (const auto& nw : kNutrientWords) {
      out.push_back({nw.slot,
                     regex(fmt::format(R"((\d+(?:\.\d+)?)\s*(?:g\b|grams?\b)?\s*(?:of\s+)?(?:{})\b)", nw.words)),
                     regex(fmt::format(R"(\b(?:{})\s*(?::|=|of|target of)?\s*(\d+(?:\.\d+)?))", nw.words)),
                     regex(fmt::format(R"(\b(?:{})\s*[:=]\s*([a-z]+))", nw.words))});
    }
    return out;
  }();
  return patterns;
}

void extract_nutrients(const std::string& u, ParamMap& out) {
  for (const auto& p : nutrient_patterns()) {
    smatch m;
    if (std::regex_search(u, m, p.before) || std::regex_search(u, m, p.after) || std::regex_search(u, m, p.textual)) {
      out[p.slot] = m[1].str();
    }
  }
}

void extract_allergies(const std::string& u, ParamMap& out) {
  static const regex list(R"(\b(?:allergic to|allergies(?:\s+to)?\s*:?|intolerant to)\s+([^.;!?\d]+))");
  smatch m;
  if (!std::regex_search(u, m, list)) return;
  static const regex sep(R"(\s*(?:,|\band\b|\bor\b)\s*)");
  const auto body = m[1].str();
  std::vector<std::string> items;
  for (auto it = std::sregex_token_iterator(body.begin(), body.end(), sep, -1); it != std::sregex_token_iterator();
       ++it) {
    auto item = trim_copy(it->str());
    if (item.empty()) continue;
    static const regex word(R"(^[a-z][a-z -]*$)");
    const auto first = item.substr(0, item.find(' '));
    if (!std::regex_match(item, word) || is_stop(first) || std::count(item.begin(), item.end(), ' ') > 1) break;
    items.push_back(item);
  }
  if (items.empty()) return;
  std::string joined;
  for (std::size_t i = 0; i < items.size(); ++i) joined += (i ? ", " : "") + items[i];
  out["allergies"] = joined;
}

ParamMap user_insertion_slots(const std::string& u, bool allow_bare_name) {
  ParamMap p;
  if (auto n = user_insertion_name(u)) {
    p["name"] = *n;
  } else if (allow_bare_name) {
    if (auto b = bare_name(u)) p["name"] = *b;
  }
  extract_nutrients(u, p);
  extract_allergies(u, p);
  return p;
}

// Dish phrase cleanup; a trailing "for <name>" becomes the user slot.
void set_dish_slots(std::string dish, std::string user, ParamMap& p) {
  dish = strip_tail(std::move(dish));
  static const regex for_user(R"(^(.*?)\s+for\s+([a-z][a-z'-]*)$)");
  smatch m;
  if (user.empty() && std::regex_match(dish, m, for_user) && !is_stop(m[2].str())) {
    user = m[2].str();
    dish = m[1].str();
  }
  dish = strip_article(trim_copy(dish));
  if (!dish.empty() && !generic_dish_words().contains(dish)) p["dish_name"] = dish;
  if (!user.empty() && !is_stop(user)) p["user_name"] = user;
}

std::optional<ParamMap> dish_info_slots(const std::string& u) {
  for (const auto& pat : dish_patterns()) {
    smatch m;
    if (!std::regex_search(u, m, pat.re)) continue;
    ParamMap p;
    set_dish_slots(m[pat.dish_group].str(), pat.user_group ? m[pat.user_group].str() : std::string(), p);
    return p;
  }
  return std::nullopt;
}

std::optional<IntentKind> triggered_kind(const std::string& u) {
  if (std::regex_search(u, kUserTrigger1) || std::regex_search(u, kUserTrigger2) ||
      std::regex_search(u, kUserTrigger3)) {
    return IntentKind::kUserInsertion;
  }
  if (std::regex_search(u, kMealTrigger1) || std::regex_search(u, kMealTrigger2) ||
      std::regex_search(u, kMealTrigger3)) {
    return IntentKind::kMealPreparation;
  }
  if (dish_info_slots(u)) return IntentKind::kDishInfo;
  return std::nullopt;
}

ParamMap slots_for(IntentKind kind, const std::string& u, bool in_context) {
  switch (kind) {
    case IntentKind::kUserInsertion:
      return user_insertion_slots(u, in_context);
    case IntentKind::kMealPreparation: {
      ParamMap p;
      auto n = meal_user_name(u);
      if (!n && in_context) n = bare_name(u);
      if (n) p["user_name"] = *n;
      return p;
    }
    case IntentKind::kDishInfo: {
      if (auto p = dish_info_slots(u)) return *p;
      ParamMap p;
      if (in_context) {
        if (auto d = bare_dish(u)) p["dish_name"] = *d;
      }
      return p;
    }
    case IntentKind::kOutOfScope:
      return {};
  }
  return {};
}

}  // namespace

Intent RuleBasedRecognizer::classify(std::string_view utterance, const RecognitionContext& context) {
  const auto u = normalize_utterance(utterance);
  Intent intent;
  if (const auto kind = triggered_kind(u)) {
    intent.kind = *kind;
    intent.params = slots_for(*kind, u, /*in_context=*/false);
    intent.confidence_note = fmt::format("rules: matched {} trigger", intent_kind_name(*kind));
    return intent;
  }
  if (context.pending_kind && *context.pending_kind != IntentKind::kOutOfScope) {
    auto params = slots_for(*context.pending_kind, u, /*in_context=*/true);
    if (!params.empty()) {
      intent.kind = *context.pending_kind;
      intent.params = std::move(params);
      intent.confidence_note =
          fmt::format("rules: slots for pending {} request", intent_kind_name(*context.pending_kind));
      return intent;
    }
  }
  intent.confidence_note = "rules: no trigger matched";
  return intent;
}

std::string RuleBasedRecognizer::identity() const { return "rules/v1"; }

// ---------------------------------------------------------------------------
// Remote backend.

RemoteRecognizer::RemoteRecognizer(std::shared_ptr<ChatTransport> transport, LlmSettings settings)
    : transport_(std::move(transport)), settings_(std::move(settings)) {}

std::string RemoteRecognizer::identity() const {
  return fmt::format("remote/{}@t={:.2f}", settings_.model, settings_.temperature_intent);
}

std::vector<ChatMessage> RemoteRecognizer::build_prompt(std::string_view utterance,
                                                        const RecognitionContext& context) const {
  std::vector<ChatMessage> msgs;
  msgs.push_back({"system", std::string(embedded_asset("intent_prompt_en.txt"))});
  std::string user;
  if (context.pending_kind) {
    std::string missing;
    for (std::size_t i = 0; i < context.missing.size(); ++i) missing += (i ? ", " : "") + context.missing[i];
    user += fmt::format("Pending request: {} (missing: {})\n", intent_kind_name(*context.pending_kind),
                        missing.empty() ? "none" : missing);
  }
  if (!context.memory.empty()) user += fmt::format("Notes so far:\n{}\n", context.memory);
  user += fmt::format("Utterance: {}", utterance);
  msgs.push_back({"user", std::move(user)});
  return msgs;
}

std::optional<Intent> parse_intent_reply(std::string_view reply) {
  std::string body(reply);
  // Tolerate a fenced code block around the object.
  if (const auto open = body.find('{'), close = body.rfind('}');
      open != std::string::npos && close != std::string::npos && close > open) {
    body = body.substr(open, close - open + 1);
  }
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("intent") || !j["intent"].is_string()) return std::nullopt;
  const auto kind = parse_intent_kind(j["intent"].get<std::string>());
  if (!kind) return std::nullopt;
  Intent intent;
  intent.kind = *kind;
  if (j.contains("params")) {
    if (!j["params"].is_object()) return std::nullopt;
    for (const auto& [key, value] : j["params"].items()) {
      std::string text;
      if (value.is_null()) continue;
      if (value.is_string()) {
        text = value.get<std::string>();
      } else if (value.is_number()) {
        text = value.dump();
      } else if (value.is_array()) {
        for (const auto& item : value) {
          if (!item.is_string()) return std::nullopt;
          text += (text.empty() ? "" : ", ") + canonical_token(item.get<std::string>());
        }
      } else {
        return std::nullopt;
      }
      text = canonical_token(text);
      if (!text.empty()) intent.params[key] = text;
    }
  }
  if (!conforms_to_schema(intent)) return std::nullopt;
  intent.confidence_note = "remote";
  return intent;
}

Intent RemoteRecognizer::classify(std::string_view utterance, const RecognitionContext& context) {
  ChatRequest req;
  req.model = settings_.model;
  req.temperature = settings_.temperature_intent;
  req.messages = build_prompt(utterance, context);
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (auto parsed = parse_intent_reply(transport_->complete(req))) {
      return drop_unsupported_slots(std::move(*parsed), utterance, context);
    }
  }
  Intent out;
  out.confidence_note = "remote: malformed reply after retry";
  return out;
}

Intent drop_unsupported_slots(Intent intent, std::string_view utterance, const RecognitionContext& context) {
  const auto u = normalize_utterance(utterance);
  const auto mem = normalize_utterance(context.memory);
  const auto supported = [&](std::string_view piece) {
    return u.find(piece) != std::string::npos || mem.find(piece) != std::string::npos;
  };
  for (auto it = intent.params.begin(); it != intent.params.end();) {
    bool ok = true;
    std::string_view v = it->second;
    while (ok && !v.empty()) {
      const auto comma = v.find(", ");
      ok = supported(v.substr(0, comma));
      v = comma == std::string_view::npos ? std::string_view{} : v.substr(comma + 2);
    }
    it = ok ? std::next(it) : intent.params.erase(it);
  }
  return intent;
}

Intent railguard(Intent intent, std::string_view utterance) {
  const auto demote = [&](std::string reason) {
    Intent out;
    out.confidence_note = std::move(reason);
    return out;
  };
  if (intent.kind == IntentKind::kOutOfScope) {
    intent.params.clear();
    return intent;
  }
  if (std::regex_search(normalize_utterance(utterance), kDeny)) return demote("railguard: unsupported operation");
  if (!conforms_to_schema(intent)) return demote("railguard: parameters outside the schema");
  static const regex number(R"(^\d+(?:\.\d+)?$)");
  for (const auto& [key, value] : intent.params) {
    const auto* spec = find_param(intent.kind, key);
    if (spec->numeric && !std::regex_match(value, number)) {
      return demote(fmt::format("railguard: '{}' is not a number for {}", value, key));
    }
  }
  return intent;
}

Intent classify(RecognizerBackend& backend, std::string_view utterance, const RecognitionContext& context) {
  if (canonical_token(utterance).empty()) throw std::invalid_argument("utterance is empty");
  auto intent = backend.classify(utterance, context);
  if (!conforms_to_schema(intent)) {
    Intent out;
    out.confidence_note = "validator: backend emitted a non-conforming intent";
    return out;
  }
  return railguard(std::move(intent), utterance);
}

}  // namespace advisor
