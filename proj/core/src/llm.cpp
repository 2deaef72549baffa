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

#include "advisor/llm.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <regex>
#include <set>

#include <fmt/format.h>

#include "advisor/errors.hpp"
#include "httplib.h"

namespace advisor {

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : std::move(fallback);
}

double env_double(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return fallback;
  char* end = nullptr;
  const double d = std::strtod(v, &end);
  if (end == v || *end != '\0') throw InvalidConfigError(fmt::format("{} is not a number: '{}'", name, v));
  return d;
}

}  // namespace

LlmSettings LlmSettings::from_env() {
  LlmSettings s;
  s.endpoint = env_or("ADVISOR_LLM_ENDPOINT", "");
  s.api_key = env_or("ADVISOR_LLM_API_KEY", "");
  s.model = env_or("ADVISOR_LLM_MODEL", s.model);
  s.temperature_intent = env_double("ADVISOR_TEMP_INTENT", s.temperature_intent);
  s.temperature_inner = env_double("ADVISOR_TEMP_INNER", s.temperature_inner);
  s.temperature_outer = env_double("ADVISOR_TEMP_OUTER", s.temperature_outer);
  return s;
}

HttpChatTransport::HttpChatTransport(LlmSettings settings) : settings_(std::move(settings)) {
  if (settings_.endpoint.empty()) throw InvalidConfigError("ADVISOR_LLM_ENDPOINT is not set");
}

std::string HttpChatTransport::complete(const ChatRequest& request) {
  // Split "scheme://host[:port]/base" into the client origin and path prefix.
  const auto& url = settings_.endpoint;
  const auto scheme_end = url.find("://");
  const auto path_begin = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const auto origin = url.substr(0, path_begin);
  auto base = path_begin == std::string::npos ? std::string() : url.substr(path_begin);
  if (!base.empty() && base.back() == '/') base.pop_back();

  nlohmann::json body;
  body["model"] = request.model.empty() ? settings_.model : request.model;
  body["temperature"] = request.temperature;
  body["messages"] = nlohmann::json::array();
  for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});

  httplib::Client client(origin);
  client.set_connection_timeout(settings_.timeout_seconds);
  client.set_read_timeout(settings_.timeout_seconds);
  httplib::Headers headers;
  if (!settings_.api_key.empty()) headers.emplace("Authorization", "Bearer " + settings_.api_key);

  const auto res = client.Post(base + "/chat/completions", headers, body.dump(), "application/json");
  if (!res) throw BackendUnavailableError(fmt::format("chat endpoint unreachable: {}", httplib::to_string(res.error())));
  if (res->status != 200) throw BackendUnavailableError(fmt::format("chat endpoint returned HTTP {}", res->status));
  try {
    const auto reply = nlohmann::json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendUnavailableError(fmt::format("unexpected chat reply shape: {}", e.what()));
  }
}

std::vector<std::string> numeric_tokens(std::string_view text) {
  static const std::regex number(R"([-+]?\d+(?:\.\d+)?)");
  std::vector<std::string> out;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), number); it != std::sregex_iterator(); ++it) {
    out.push_back(it->str());
  }
  return out;
}

LlmPhraser::LlmPhraser(std::shared_ptr<ChatTransport> transport, std::string model, double temperature)
    : transport_(std::move(transport)), model_(std::move(model)), temperature_(temperature) {}

std::optional<std::string> LlmPhraser::rephrase(std::string_view purpose, std::string_view draft,
                                                const nlohmann::json& facts) {
  ChatRequest req;
  req.model = model_;
  req.temperature = temperature_;
  req.messages.push_back(
      {"system", fmt::format("You are the voice of a dietary-advice robot. Rewrite the draft ({}) so it sounds "
                             "natural. Keep every number, dish name and allergen exactly as written. Do not add "
                             "facts. Reply with the rewritten text only.",
                             purpose)});
  req.messages.push_back({"user", fmt::format("Facts: {}\nDraft: {}", facts.dump(), draft)});
  std::string reply;
  try {
    reply = transport_->complete(req);
  } catch (const BackendUnavailableError&) {
    return std::nullopt;
  }
  const auto strip = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
  };
  reply = strip(reply);
  if (reply.empty()) return std::nullopt;
  const auto allowed_list = numeric_tokens(draft);
  const std::set<std::string> allowed(allowed_list.begin(), allowed_list.end());
  for (const auto& tok : numeric_tokens(reply)) {
    if (!allowed.contains(tok)) return std::nullopt;
  }
  return reply;
}

}  // namespace advisor
