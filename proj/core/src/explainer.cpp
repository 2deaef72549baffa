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

#include "advisor/explainer.hpp"

#include <cstdlib>

#include <fmt/format.h>

#include "advisor/errors.hpp"

namespace advisor {

using nlohmann::json;

std::string_view explanation_kind_name(ExplanationKind k) {
  switch (k) {
    case ExplanationKind::kQueryExplanation:
      return "query_explanation";
    case ExplanationKind::kSolverExplanation:
      return "solver_explanation";
    case ExplanationKind::kClarification:
      return "clarification";
    case ExplanationKind::kRefusal:
      return "refusal";
    case ExplanationKind::kConfirmation:
      return "confirmation";
  }
  return "refusal";
}

std::string signed_percent(Nutrients::Tenths difference, Nutrients::Tenths target) {
  if (target <= 0) throw InternalError("percentage against a non-positive target");
  // Tenths of a percent: |d| * 1000 / t, rounded half up on the magnitude.
  const auto magnitude = std::llabs(difference);
  const auto tenths = (2 * magnitude * 1000 + target) / (2 * target);
  if (tenths == 0) return "0.0%";
  return fmt::format("{}{}%", difference > 0 ? "+" : "-", format_tenths(tenths));
}

std::vector<std::string> payload_numbers(const json& payload) {
  std::vector<std::string> out;
  const auto walk = [&](const auto& self, const json& j) -> void {
    if (j.is_string()) {
      for (auto& t : numeric_tokens(j.get<std::string>())) out.push_back(std::move(t));
    } else if (j.is_number()) {
      out.push_back(j.dump());
    } else if (j.is_structured()) {
      for (const auto& child : j) self(self, child);
    }
  };
  walk(walk, payload);
  return out;
}

std::string join_list(std::span<const std::string> items, std::string_view last_sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += i + 1 == items.size() ? std::string(last_sep) : std::string(", ");
    out += items[i];
  }
  return out;
}

namespace {

std::vector<std::string> allergen_names(const AllergenSet& s) {
  std::vector<std::string> out;
  for (const auto& a : s) out.push_back(a.name());
  return out;
}

void put_nutrients(TemplateVars& vars, json& payload, const Nutrients& n) {
  for (const auto k : kAllNutrients) {
    const auto text = format_tenths(n.tenths(k));
    vars[std::string(nutrient_name(k))] = text;
    payload[std::string(nutrient_name(k))] = text;
  }
}

void both(TemplateVars& vars, json& payload, const char* key, const std::string& value) {
  vars[key] = value;
  payload[key] = value;
}

}  // namespace

Explainer::Explainer(const TemplateSet& templates, Phraser* phraser) : templates_(templates), phraser_(phraser) {}

Explanation Explainer::finish(ExplanationKind kind, std::string_view purpose, std::string draft, json payload) const {
  Explanation e;
  e.kind = kind;
  e.structured = std::move(payload);
  e.text = std::move(draft);
  if (phraser_ != nullptr) {
    if (auto better = phraser_->rephrase(purpose, e.text, e.structured)) e.text = std::move(*better);
  }
  return e;
}

Explanation Explainer::explain_query(const QueryIR& q, const QueryResult& r) const {
  if (!(r.source_query == q)) throw InternalError("query result does not belong to the query");
  const auto& t = templates_;
  TemplateVars vars;
  json payload;
  payload["query"] = std::string(query_kind_name(q.kind));
  payload["query_text"] = render_query_text(q);
  const auto bound = [&](const char* name) {
    const auto it = q.bindings.find(name);
    return it != q.bindings.end() && std::holds_alternative<std::string>(it->second) ? std::get<std::string>(it->second)
                                                                                    : std::string();
  };
  const auto none = t.raw("word.none");
  const auto list_or_none = [&](const AllergenSet& s) {
    const auto names = allergen_names(s);
    return names.empty() ? none : join_list(names);
  };

  switch (q.kind) {
    case QueryKind::kFetchDish: {
      if (r.status != QueryStatus::kOk) {
        both(vars, payload, "dish", bound("dish_name"));
        payload["found"] = false;
        return finish(ExplanationKind::kQueryExplanation, "dish lookup", t.render("explain.dish_missing", vars), payload);
      }
      const auto& d = r.dishes.front();
      both(vars, payload, "dish", d.name);
      payload["found"] = true;
      put_nutrients(vars, payload, d.nutrients);
      vars["allergens"] = list_or_none(d.allergens);
      payload["allergens"] = allergen_names(d.allergens);
      return finish(ExplanationKind::kQueryExplanation, "dish lookup", t.render("explain.dish_found", vars), payload);
    }
    case QueryKind::kFetchUserNeeds: {
      if (r.status != QueryStatus::kOk) {
        both(vars, payload, "user", bound("user_name"));
        payload["found"] = false;
        return finish(ExplanationKind::kQueryExplanation, "user lookup", t.render("explain.user_missing", vars), payload);
      }
      const auto& u = r.users.front();
      both(vars, payload, "user", u.name);
      payload["found"] = true;
      put_nutrients(vars, payload, u.needs);
      vars["allergies"] = list_or_none(u.allergies);
      payload["allergies"] = allergen_names(u.allergies);
      return finish(ExplanationKind::kQueryExplanation, "user lookup", t.render("explain.user_found", vars), payload);
    }
    case QueryKind::kFilterSafeDishes: {
      if (r.status != QueryStatus::kOk) {
        both(vars, payload, "user", bound("user_name"));
        payload["found"] = false;
        return finish(ExplanationKind::kQueryExplanation, "allergen filter", t.render("explain.user_missing", vars),
                      payload);
      }
      const auto& u = r.users.front();
      both(vars, payload, "user", u.name);
      payload["found"] = true;
      payload["allergies"] = allergen_names(u.allergies);
      payload["kept"] = r.dishes.size();
      payload["total"] = r.scanned;
      vars["kept"] = std::to_string(r.dishes.size());
      vars["total"] = std::to_string(r.scanned);
      vars["allergies"] = list_or_none(u.allergies);
      const auto key = u.allergies.empty() ? "explain.filter_none" : "explain.filter_allergies";
      return finish(ExplanationKind::kQueryExplanation, "allergen filter", t.render(key, vars), payload);
    }
    case QueryKind::kCreateUser: {
      const auto& name = bound("name");
      both(vars, payload, "user", name);
      if (r.status == QueryStatus::kOk) {
        const auto& u = r.users.front();
        put_nutrients(vars, payload, u.needs);
        vars["allergies"] = list_or_none(u.allergies);
        payload["allergies"] = allergen_names(u.allergies);
        payload["created"] = true;
        return finish(ExplanationKind::kConfirmation, "user created", t.render("explain.user_created", vars), payload);
      }
      payload["created"] = false;
      const auto& needs = std::get<Nutrients>(q.bindings.at("needs"));
      std::vector<std::string> bad;
      for (const auto k : kAllNutrients) {
        if (needs.tenths(k) <= 0) bad.push_back(t.raw(fmt::format("param.{}", nutrient_name(k))));
      }
      if (bad.empty()) {
        return finish(ExplanationKind::kQueryExplanation, "user rejected", t.render("explain.user_duplicate", vars),
                      payload);
      }
      vars["targets"] = join_list(bad);
      return finish(ExplanationKind::kQueryExplanation, "user rejected", t.render("explain.user_invalid", vars),
                    payload);
    }
  }
  throw InternalError("unknown query kind");
}

Explanation Explainer::explain_solution(const SolverReport& report, const Nutrients& targets,
                                        std::string_view user) const {
  if (report.solutions.empty()) throw EmptyReportError("no solutions to explain");
  const auto& t = templates_;
  json payload;
  TemplateVars head;
  both(head, payload, "user", std::string(user));
  json target_json;
  put_nutrients(head, target_json, targets);
  payload["targets"] = target_json;
  std::string text = t.render("explain.solution_header", head);
  payload["plans"] = json::array();
  for (std::size_t i = 0; i < report.solutions.size(); ++i) {
    const auto& s = report.solutions[i];
    TemplateVars vars;
    json plan;
    plan["rank"] = i + 1;
    vars["rank"] = std::to_string(i + 1);
    plan["dishes"] = s.dish_names;
    vars["dishes"] = join_list(s.dish_names);
    json totals;
    put_nutrients(vars, totals, s.totals);
    plan["totals"] = totals;
    json deviations;
    for (const auto k : kAllNutrients) {
      const auto idx = static_cast<std::size_t>(k);
      const auto pct = signed_percent(s.breakdown.differences[idx], targets.tenths(k));
      deviations[std::string(nutrient_name(k))] = pct;
      vars[fmt::format("dev_{}", nutrient_name(k))] = pct;
    }
    plan["deviations"] = deviations;
    payload["plans"].push_back(plan);
    text += "\n" + t.render("explain.solution_option", vars);
  }
  return finish(ExplanationKind::kSolverExplanation, "meal plan", std::move(text), payload);
}

Explanation Explainer::explain_no_solution(std::string_view user, std::size_t candidates,
                                           const SolverConfig& config) const {
  json payload;
  TemplateVars vars;
  both(vars, payload, "user", std::string(user));
  payload["candidates"] = candidates;
  vars["candidates"] = std::to_string(candidates);
  payload["max_dishes"] = config.max_dishes;
  vars["max_dishes"] = std::to_string(config.max_dishes);
  // threshold_ppm / 1000 is the threshold in tenths of a percent.
  const auto pct = format_tenths(config.threshold_ppm() / 1000);
  vars["threshold"] = payload["threshold_percent"] = pct;
  payload["plans"] = json::array();
  return finish(ExplanationKind::kSolverExplanation, "no meal plan", templates_.render("explain.no_solution", vars),
                payload);
}

Explanation Explainer::allergen_check(const Dish& dish, const UserProfile& user) const {
  json payload;
  TemplateVars vars;
  both(vars, payload, "dish", dish.name);
  both(vars, payload, "user", user.name);
  std::vector<std::string> shared;
  for (const auto& a : dish.allergens) {
    if (user.allergies.contains(a)) shared.push_back(a.name());
  }
  payload["shared_allergens"] = shared;
  payload["safe"] = shared.empty();
  std::string key = "explain.allergen_warning";
  if (shared.empty()) {
    key = user.allergies.empty() ? "explain.allergen_safe_none" : "explain.allergen_safe";
  } else {
    vars["shared"] = join_list(shared);
  }
  return finish(ExplanationKind::kQueryExplanation, "allergen check", templates_.render(key, vars), payload);
}

Explanation Explainer::ask_clarification(std::span<const std::string> missing, IntentKind kind) const {
  if (missing.empty()) throw InternalError("clarification without missing parameters");
  json payload;
  payload["missing"] = std::vector<std::string>(missing.begin(), missing.end());
  payload["intent"] = std::string(intent_kind_name(kind));
  if (kind == IntentKind::kMealPreparation && missing.size() == 1 && missing.front() == "user_name") {
    return finish(ExplanationKind::kClarification, "clarification", templates_.render("clarify.meal_user"), payload);
  }
  std::vector<std::string> phrases;
  for (const auto& p : missing) {
    const auto key = "param." + p;
    if (!templates_.contains(key) || (kind != IntentKind::kOutOfScope && find_param(kind, p) == nullptr)) {
      throw InternalError(fmt::format("no description for parameter '{}'", p));
    }
    phrases.push_back(templates_.raw(key));
  }
  TemplateVars vars;
  vars["action"] = templates_.raw(fmt::format("action.{}", intent_kind_name(kind)));
  vars["params"] = join_list(phrases);
  return finish(ExplanationKind::kClarification, "clarification", templates_.render("clarify.question", vars),
                payload);
}

Explanation Explainer::refuse_out_of_scope(std::string_view utterance) const {
  json payload;
  payload["utterance"] = std::string(utterance);
  payload["supported"] = {"user_insertion", "dish_info", "meal_preparation"};
  return finish(ExplanationKind::kRefusal, "refusal", templates_.render("refuse.out_of_scope"), payload);
}

Explanation Explainer::give_up(IntentKind kind, int replan_cap) const {
  json payload;
  payload["intent"] = std::string(intent_kind_name(kind));
  payload["replan_cap"] = replan_cap;
  TemplateVars vars;
  vars["action"] = templates_.raw(fmt::format("action.{}", intent_kind_name(kind)));
  vars["cap"] = std::to_string(replan_cap);
  return finish(ExplanationKind::kRefusal, "give up", templates_.render("reply.give_up", vars), payload);
}

}  // namespace advisor
