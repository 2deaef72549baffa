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

#include "advisor/http_api.hpp"

#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "advisor/errors.hpp"
#include "httplib.h"

namespace advisor {

using nlohmann::json;

namespace {

HttpResponse error(int status, std::string message) { return {status, json{{"error", std::move(message)}}}; }

std::vector<std::string_view> segments(std::string_view path) {
  std::vector<std::string_view> out;
  while (!path.empty()) {
    if (path.front() == '/') {
      path.remove_prefix(1);
      continue;
    }
    const auto slash = path.find('/');
    out.push_back(path.substr(0, slash));
    path = slash == std::string_view::npos ? std::string_view{} : path.substr(slash);
  }
  return out;
}

// Parses an optional object body; nullopt-like failure is reported via `err`.
bool parse_object(std::string_view body, json& out, HttpResponse& err) {
  if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    out = json::object();
    return true;
  }
  out = json::parse(body, nullptr, false);
  if (out.is_discarded()) {
    err = error(400, "body is not valid JSON");
    return false;
  }
  if (!out.is_object()) {
    err = error(400, "body must be a JSON object");
    return false;
  }
  return true;
}

}  // namespace

HttpResponse HttpApi::create_session(std::string_view body) const {
  json j;
  HttpResponse err;
  if (!parse_object(body, j, err)) return err;
  auto options = service_.config().session;
  for (const auto& [key, value] : j.items()) {
    if (key == "transparency") {
      if (!value.is_boolean()) return error(400, "transparency must be a boolean");
      options.transparency = value.get<bool>();
    } else if (key == "replan_cap" || key == "max_dishes" || key == "max_solutions") {
      if (!value.is_number_integer()) return error(400, fmt::format("{} must be an integer", key));
      const auto n = value.get<long long>();
      if (n < 1 || n > 1000) return error(400, fmt::format("{} must be between 1 and 1000", key));
      auto& slot = key == "replan_cap"   ? options.replan_cap
                   : key == "max_dishes" ? options.solver.max_dishes
                                         : options.solver.max_solutions;
      slot = static_cast<int>(n);
    } else if (key == "threshold") {
      if (!value.is_number()) return error(400, "threshold must be a number");
      options.solver.threshold = value.get<double>();
    } else {
      return error(400, fmt::format("unknown field '{}'", key));
    }
  }
  std::string id;
  try {
    id = service_.create_session(options);
  } catch (const InvalidConfigError& e) {
    return error(400, e.what());
  }
  return {201,
          json{{"session_id", id},
               {"state", std::string(session_state_name(SessionState::kAwaitingInput))},
               {"transparency", options.transparency},
               {"replan_cap", options.replan_cap}}};
}

HttpResponse HttpApi::post_message(const std::string& id, std::string_view body) const {
  json j;
  HttpResponse err;
  if (!parse_object(body, j, err)) return err;
  for (const auto& [key, _] : j.items()) {
    if (key != "text") return error(400, fmt::format("unknown field '{}'", key));
  }
  if (!j.contains("text")) return error(400, "missing field 'text'");
  if (!j["text"].is_string()) return error(400, "text must be a string");
  try {
    return {200, to_json(service_.post_message(id, j["text"].get<std::string>()))};
  } catch (const NotFoundError& e) {
    return error(404, e.what());
  } catch (const TurnInFlightError& e) {
    return error(409, e.what());
  } catch (const std::invalid_argument& e) {
    return error(422, e.what());
  } catch (const BackendUnavailableError& e) {
    return error(503, e.what());
  }
}

HttpResponse HttpApi::handle(std::string_view method, std::string_view path, std::string_view body) const {
  const auto q = path.find('?');
  if (q != std::string_view::npos) path = path.substr(0, q);
  const auto seg = segments(path);
  try {
    if (seg.size() == 1 && seg[0] == "health") {
      if (method != "GET") return error(405, "use GET");
      return {200,
              json{{"status", "ok"},
                   {"backend", service_.backend_identity()},
                   {"sessions", service_.session_count()},
                   {"users", service_.store().user_count()},
                   {"dishes", service_.store().dish_count()}}};
    }
    if (seg.size() == 1 && seg[0] == "sessions") {
      if (method != "POST") return error(405, "use POST");
      return create_session(body);
    }
    if (seg.size() >= 2 && seg[0] == "sessions") {
      const std::string id(seg[1]);
      if (seg.size() == 2) {
        if (method != "DELETE") return error(405, "use DELETE");
        service_.close_session(id);
        return {200, json{{"session_id", id}, {"state", "Closed"}}};
      }
      if (seg.size() == 3 && seg[2] == "messages") {
        if (method != "POST") return error(405, "use POST");
        return post_message(id, body);
      }
      if (seg.size() == 3 && seg[2] == "transcript") {
        if (method != "GET") return error(405, "use GET");
        json turns = json::array();
        for (const auto& r : service_.transcript(id)) turns.push_back(to_json(r));
        return {200, json{{"session_id", id},
                          {"state", std::string(session_state_name(service_.session_state(id)))},
                          {"turns", turns}}};
      }
    }
    return error(404, fmt::format("no route for {}", path));
  } catch (const NotFoundError& e) {
    return error(404, e.what());
  } catch (const TurnInFlightError& e) {
    return error(409, e.what());
  } catch (const Error& e) {
    return error(500, e.what());
  }
}

void HttpApi::mount(httplib::Server& server) const {
  const auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const auto r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get(R"(/health)", forward);
  server.Post(R"(/sessions)", forward);
  server.Post(R"(/sessions/[^/]+/messages)", forward);
  server.Get(R"(/sessions/[^/]+/transcript)", forward);
  server.Delete(R"(/sessions/[^/]+)", forward);
}

}  // namespace advisor
