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

#include <cstdlib>
#include <memory>
#include <thread>

#include "advisor/llm.hpp"
#include "doctest.h"
#include "fake_transport.hpp"
#include "httplib.h"

using namespace advisor;
using advisor::testing::FakeTransport;
using advisor::testing::queued;

TEST_CASE("numeric tokens") {
  CHECK(numeric_tokens("450.0 kcal, -2.5% and 12 g") == std::vector<std::string>{"450.0", "-2.5", "12"});
  CHECK(numeric_tokens("no numbers").empty());
  CHECK(numeric_tokens("+10.0%") == std::vector<std::string>{"+10.0"});
}

TEST_CASE("phraser keeps rewrites that reuse the draft's numbers") {
  auto t = std::make_shared<FakeTransport>(queued({"  Lasagna packs 520.0 kcal.  "}));
  LlmPhraser p(t, "m", 0.25);
  const auto out = p.rephrase("dish", "Lasagna has 520.0 kcal.", nlohmann::json{{"calories", "520.0"}});
  REQUIRE(out.has_value());
  CHECK(*out == "Lasagna packs 520.0 kcal.");
  const auto req = t->requests().at(0);
  CHECK(req.model == "m");
  CHECK(req.temperature == 0.25);
  REQUIRE(req.messages.size() == 2);
  CHECK(req.messages[1].content.find("Lasagna has 520.0 kcal.") != std::string::npos);
}

TEST_CASE("phraser falls back to the draft") {
  const auto draft = "Lasagna has 520.0 kcal.";
  SUBCASE("a new number is introduced") {
    LlmPhraser p(std::make_shared<FakeTransport>(queued({"Lasagna has about 500 kcal."})), "m", 0.1);
    CHECK_FALSE(p.rephrase("dish", draft, {}).has_value());
  }
  SUBCASE("a number is reformatted") {
    LlmPhraser p(std::make_shared<FakeTransport>(queued({"Lasagna has 520 kcal."})), "m", 0.1);
    CHECK_FALSE(p.rephrase("dish", draft, {}).has_value());
  }
  SUBCASE("empty reply") {
    LlmPhraser p(std::make_shared<FakeTransport>(queued({"   "})), "m", 0.1);
    CHECK_FALSE(p.rephrase("dish", draft, {}).has_value());
  }
  SUBCASE("transport down") {
    LlmPhraser p(std::make_shared<FakeTransport>(queued({})), "m", 0.1);
    CHECK_FALSE(p.rephrase("dish", draft, {}).has_value());
  }
}

TEST_CASE("settings from the environment") {
  ::setenv("ADVISOR_LLM_ENDPOINT", "http://127.0.0.1:9", 1);
  ::setenv("ADVISOR_TEMP_OUTER", "0.4", 1);
  const auto s = LlmSettings::from_env();
  CHECK(s.endpoint == "http://127.0.0.1:9");
  CHECK(s.temperature_outer == doctest::Approx(0.4));
  CHECK(s.temperature_inner == doctest::Approx(0.1));
  CHECK(s.temperature_intent == doctest::Approx(0.0));
  ::unsetenv("ADVISOR_LLM_ENDPOINT");
  ::unsetenv("ADVISOR_TEMP_OUTER");
}

TEST_CASE("http transport reports an unreachable endpoint") {
  LlmSettings s;
  s.endpoint = "http://127.0.0.1:1";
  s.timeout_seconds = 2;
  HttpChatTransport t(s);
  ChatRequest req;
  req.messages.push_back({"user", "hi"});
  CHECK_THROWS_AS(t.complete(req), BackendUnavailableError);
}

TEST_CASE("http transport speaks the chat-completions shape") {
  httplib::Server server;
  nlohmann::json seen;
  std::string auth;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices": [{"message": {"role": "assistant", "content": "ok"}}]})", "application/json");
  });
  server.Post("/broken/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"unexpected": true})", "application/json");
  });
  server.Post("/down/chat/completions", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  LlmSettings s;
  s.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/";
  s.api_key = "secret";
  s.model = "default-model";
  ChatRequest req;
  req.temperature = 0.1;
  req.messages.push_back({"system", "sys"});
  req.messages.push_back({"user", "hi"});
  CHECK(HttpChatTransport(s).complete(req) == "ok");
  CHECK(seen["model"] == "default-model");
  CHECK(seen["temperature"].get<double>() == doctest::Approx(0.1));
  CHECK(seen["messages"].size() == 2);
  CHECK(seen["messages"][1]["content"] == "hi");
  CHECK(auth == "Bearer secret");

  s.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/broken";
  CHECK_THROWS_AS(HttpChatTransport(s).complete(req), BackendUnavailableError);
  s.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/down";
  CHECK_THROWS_AS(HttpChatTransport(s).complete(req), BackendUnavailableError);
  s.endpoint.clear();
  CHECK_THROWS_AS(HttpChatTransport{s}, InvalidConfigError);

  server.stop();
  th.join();
}
