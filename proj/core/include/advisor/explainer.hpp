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

// Outer speech: everything the user reads.

#ifndef ADVISOR_EXPLAINER_HPP_
#define ADVISOR_EXPLAINER_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "advisor/domain.hpp"
#include "advisor/intent.hpp"
#include "advisor/llm.hpp"
#include "advisor/query.hpp"
#include "advisor/solver.hpp"
#include "advisor/templates.hpp"

namespace advisor {

enum class ExplanationKind : std::uint8_t {
  kQueryExplanation,
  kSolverExplanation,
  kClarification,
  kRefusal,
  kConfirmation,
};

std::string_view explanation_kind_name(ExplanationKind k);

struct Explanation {
  ExplanationKind kind = ExplanationKind::kRefusal;
  std::string text;
  // Mirrors the text. Nutrient amounts are strings at one decimal place,
  // deviations are signed percentage strings, counts are integers.
  nlohmann::json structured = nlohmann::json::object();
};

// (total - target) / target as a percentage with one decimal and an explicit
// sign: "+10.0%", "-2.5%", "0.0%". Rounded half away from zero in integer
// arithmetic.
std::string signed_percent(Nutrients::Tenths difference, Nutrients::Tenths target);

// Numeric tokens found anywhere in a payload (strings are scanned, numbers
// dumped).
std::vector<std::string> payload_numbers(const nlohmann::json& payload);

class Explainer {
 public:
  // `phraser` may be null; otherwise drafts are offered to it for rewording.
  explicit Explainer(const TemplateSet& templates = TemplateSet::builtin(), Phraser* phraser = nullptr);

  Explanation explain_query(const QueryIR& q, const QueryResult& r) const;

  // Throws EmptyReportError when the report has no solutions.
  Explanation explain_solution(const SolverReport& report, const Nutrients& targets, std::string_view user) const;
  Explanation explain_no_solution(std::string_view user, std::size_t candidates, const SolverConfig& config) const;

  // Dish-versus-user allergen check for dish information requests.
  Explanation allergen_check(const Dish& dish, const UserProfile& user) const;

  // One question naming every missing parameter. Throws InternalError for a
  // parameter with no description template.
  Explanation ask_clarification(std::span<const std::string> missing, IntentKind kind) const;

  Explanation refuse_out_of_scope(std::string_view utterance) const;
  Explanation give_up(IntentKind kind, int replan_cap) const;

  const TemplateSet& templates() const { return templates_; }

 private:
  Explanation finish(ExplanationKind kind, std::string_view purpose, std::string draft, nlohmann::json payload) const;

  const TemplateSet& templates_;
  Phraser* phraser_;
};

// "a, b and c"
std::string join_list(std::span<const std::string> items, std::string_view last_sep = " and ");

}  // namespace advisor

#endif  // ADVISOR_EXPLAINER_HPP_
