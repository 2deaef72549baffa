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

#include "advisor/query.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include <fmt/format.h>

#include "advisor/errors.hpp"

namespace advisor {

std::string_view query_kind_name(QueryKind k) {
  switch (k) {
    case QueryKind::kFetchDish:
      return "FetchDish";
    case QueryKind::kFetchUserNeeds:
      return "FetchUserNeeds";
    case QueryKind::kFilterSafeDishes:
      return "FilterSafeDishes";
    case QueryKind::kCreateUser:
      return "CreateUser";
  }
  return "FetchDish";
}

std::vector<std::string_view> required_bindings(QueryKind k) {
  switch (k) {
    case QueryKind::kFetchDish:
      return {"dish_name"};
    case QueryKind::kFetchUserNeeds:
    case QueryKind::kFilterSafeDishes:
      return {"user_name"};
    case QueryKind::kCreateUser:
      return {"allergies", "name", "needs"};
  }
  return {};
}

bool bindings_complete(const QueryIR& q) {
  const auto req = required_bindings(q.kind);
  if (req.size() != q.bindings.size()) return false;
  return std::all_of(req.begin(), req.end(), [&](std::string_view n) { return q.bindings.contains(std::string(n)); });
}

std::string display_name(std::string_view name) {
  std::string out(name);
  bool start = true;
  for (auto& c : out) {
    if (start && std::isalpha(static_cast<unsigned char>(c))) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    start = c == ' ' || c == '-' || c == '\'';
  }
  return out;
}

namespace {

const std::string& require(const Intent& intent, const char* name) {
  const auto it = intent.params.find(name);
  if (it == intent.params.end() || it->second.empty()) {
    throw InvalidConfigError(fmt::format("{} request without '{}'", intent_kind_name(intent.kind), name));
  }
  return it->second;
}

double parse_amount(const Intent& intent, const char* name) {
  const auto& text = require(intent, name);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidConfigError(fmt::format("'{}' is not a number for {}", text, name));
  }
  return v;
}

AllergenSet split_allergies(std::string_view text) {
  std::vector<std::string> items;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = canonical_token(text.substr(0, comma));
    if (!item.empty()) items.push_back(item);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
  }
  return make_allergens(items);
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

const std::string& str(const QueryIR& q, const char* name) {
  const auto it = q.bindings.find(name);
  if (it == q.bindings.end() || !std::holds_alternative<std::string>(it->second)) {
    throw InternalError(fmt::format("{} lacks string binding '{}'", query_kind_name(q.kind), name));
  }
  return std::get<std::string>(it->second);
}

template <typename T>
const T& typed(const QueryIR& q, const char* name) {
  const auto it = q.bindings.find(name);
  if (it == q.bindings.end() || !std::holds_alternative<T>(it->second)) {
    throw InternalError(fmt::format("{} lacks binding '{}'", query_kind_name(q.kind), name));
  }
  return std::get<T>(it->second);
}

}  // namespace

std::vector<QueryIR> compile(const Intent& intent) {
  switch (intent.kind) {
    case IntentKind::kOutOfScope:
      throw UnsupportedIntentError("out_of_scope requests have no queries");
    case IntentKind::kDishInfo: {
      std::vector<QueryIR> out{{QueryKind::kFetchDish, {{"dish_name", require(intent, "dish_name")}}}};
      if (const auto it = intent.params.find("user_name"); it != intent.params.end() && !it->second.empty()) {
        out.push_back({QueryKind::kFetchUserNeeds, {{"user_name", it->second}}});
      }
      return out;
    }
    case IntentKind::kMealPreparation: {
      const auto& user = require(intent, "user_name");
      return {{QueryKind::kFetchUserNeeds, {{"user_name", user}}}, {QueryKind::kFilterSafeDishes, {{"user_name", user}}}};
    }
    case IntentKind::kUserInsertion: {
      const auto needs = Nutrients::from_values(parse_amount(intent, "calories"), parse_amount(intent, "carbs"),
                                                parse_amount(intent, "proteins"), parse_amount(intent, "fats"));
      const auto it = intent.params.find("allergies");
      QueryIR q{QueryKind::kCreateUser,
                {{"name", display_name(require(intent, "name"))},
                 {"needs", needs},
                 {"allergies", split_allergies(it == intent.params.end() ? "" : it->second)}}};
      return {q};
    }
  }
  throw UnsupportedIntentError("unknown intent kind");
}

QueryResult execute(const QueryIR& q, KnowledgeStore& store) {
  QueryResult r;
  r.source_query = q;
  switch (q.kind) {
    case QueryKind::kFetchDish: {
      const auto& name = str(q, "dish_name");
      try {
        r.dishes.push_back(store.get_dish(name));
      } catch (const NotFoundError&) {
        r.status = QueryStatus::kNotFound;
        r.detail = fmt::format("no dish named '{}'", name);
      }
      return r;
    }
    case QueryKind::kFetchUserNeeds: {
      const auto& name = str(q, "user_name");
      try {
        r.users.push_back(store.get_user(name));
      } catch (const NotFoundError&) {
        r.status = QueryStatus::kNotFound;
        r.detail = fmt::format("no user named '{}'", name);
      }
      return r;
    }
    case QueryKind::kFilterSafeDishes: {
      const auto& name = str(q, "user_name");
      try {
        const auto user = store.get_user(name);
        r.users.push_back(user);
        r.scanned = store.dish_count();
        r.dishes = store.dishes_safe_for(user);
      } catch (const NotFoundError&) {
        r.status = QueryStatus::kNotFound;
        r.detail = fmt::format("no user named '{}'", name);
      }
      return r;
    }
    case QueryKind::kCreateUser: {
      UserProfile p;
      p.name = str(q, "name");
      p.needs = typed<Nutrients>(q, "needs");
      p.allergies = typed<AllergenSet>(q, "allergies");
      try {
        r.created = store.insert_user(p);
        r.users.push_back(store.get_user(p.name));
      } catch (const DuplicateUserError&) {
        r.status = QueryStatus::kRejected;
        r.detail = "a user with that name already exists";
      } catch (const InvalidProfileError& e) {
        r.status = QueryStatus::kRejected;
        std::string list;
        for (const auto& v : e.violations()) list += (list.empty() ? "" : ", ") + describe(v);
        r.detail = fmt::format("invalid profile: {}", list);
      }
      return r;
    }
  }
  throw InternalError("unknown query kind");
}

std::string binding_text(const BindingValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return quote(*s);
  if (const auto* n = std::get_if<Nutrients>(&v)) {
    return fmt::format("{{calories: {}, carbs: {}, proteins: {}, fats: {}}}", format_tenths(n->tenths(Nutrient::kCalories)),
                       format_tenths(n->tenths(Nutrient::kCarbs)), format_tenths(n->tenths(Nutrient::kProteins)),
                       format_tenths(n->tenths(Nutrient::kFats)));
  }
  const auto& set = std::get<AllergenSet>(v);
  std::string out = "[";
  for (const auto& a : set) out += (out.size() > 1 ? ", " : "") + quote(a.name());
  return out + "]";
}

std::string render_query_text(const QueryIR& q) {
  const auto b = [&](const char* name) {
    const auto it = q.bindings.find(name);
    if (it == q.bindings.end()) throw InternalError(fmt::format("{} lacks binding '{}'", query_kind_name(q.kind), name));
    return binding_text(it->second);
  };
  switch (q.kind) {
    case QueryKind::kFetchDish:
      return fmt::format(
          "MATCH (d:Dish {{name: {}}}) OPTIONAL MATCH (d)-[:has_allergen]->(a:Allergen) RETURN d, collect(a.name)",
          b("dish_name"));
    case QueryKind::kFetchUserNeeds:
      return fmt::format(
          "MATCH (u:User {{name: {}}})-[:has_nutritional_needs]->(n:Needs) OPTIONAL MATCH "
          "(u)-[:is_allergic_to]->(a:Allergen) RETURN u, n, collect(a.name)",
          b("user_name"));
    case QueryKind::kFilterSafeDishes:
      return fmt::format(
          "MATCH (u:User {{name: {}}}), (d:Dish) WHERE NOT EXISTS {{ MATCH "
          "(d)-[:has_allergen]->(:Allergen)<-[:is_allergic_to]-(u) }} RETURN d ORDER BY d.name",
          b("user_name"));
    case QueryKind::kCreateUser:
      return fmt::format(
          "CREATE (u:User {{name: {}}})-[:has_nutritional_needs]->(:Needs {}) WITH u UNWIND {} AS a "
          "MERGE (x:Allergen {{name: a}}) CREATE (u)-[:is_allergic_to]->(x) RETURN u",
          b("name"), b("needs"), b("allergies"));
  }
  return {};
}

}  // namespace advisor
