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

// JSON over HTTP:
//   GET    /health
//   POST   /sessions                    {"transparency"?, "replan_cap"?, "max_dishes"?, "max_solutions"?, "threshold"?}
//   POST   /sessions/{id}/messages      {"text"}
//   GET    /sessions/{id}/transcript
//   DELETE /sessions/{id}
// Errors are {"error": message} with 400 (bad body), 404 (unknown or closed
// session), 405, 409 (turn in flight), 422 (empty text) or 503 (remote
// recognizer unreachable; the session is left as it was).

#ifndef ADVISOR_HTTP_API_HPP_
#define ADVISOR_HTTP_API_HPP_

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "advisor/service.hpp"

namespace httplib {
class Server;
}

namespace advisor {

struct HttpResponse {
  int status = 200;
  nlohmann::json body;
};

class HttpApi {
 public:
  explicit HttpApi(AdvisorService& service) : service_(service) {}

  // Transport-free entry point; everything the server does goes through here.
  HttpResponse handle(std::string_view method, std::string_view path, std::string_view body) const;

  // Registers the routes on an httplib server.
  void mount(httplib::Server& server) const;

 private:
  HttpResponse create_session(std::string_view body) const;
  HttpResponse post_message(const std::string& id, std::string_view body) const;

  AdvisorService& service_;
};

}  // namespace advisor

#endif  // ADVISOR_HTTP_API_HPP_
