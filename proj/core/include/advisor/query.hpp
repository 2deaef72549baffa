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

#ifndef ADVISOR_QUERY_HPP_
#define ADVISOR_QUERY_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "advisor/domain.hpp"
#include "advisor/intent.hpp"
#include "advisor/knowledge_store.hpp"

namespace advisor {

enum class QueryKind : std::uint8_t { kFetchDish, kFetchUserNeeds, kFilterSafeDishes, kCreateUser };

std::string_view query_kind_name(QueryKind k);

using BindingValue = std::variant<std::string, Nutrients, AllergenSet>;

struct QueryIR {
  QueryKind kind = QueryKind::kFetchDish;
  std::map<std::string, BindingValue> bindings;

  friend bool operator==(const QueryIR&, const QueryIR&) = default;
};

// Binding names required by each kind, sorted.
std::vector<std::string_view> required_bindings(QueryKind k);
bool bindings_complete(const QueryIR& q);

enum class QueryStatus : std::uint8_t { kOk, kNotFound, kRejected };

struct QueryResult {
  QueryIR source_query;
  QueryStatus status = QueryStatus::kOk;
  std::vector<Dish> dishes;
  std::vector<UserProfile> users;
  std::optional<UserId> created;
  // FilterSafeDishes: dishes considered before the allergen filter.
  std::size_t scanned = 0;
  std::string detail;

  bool incomplete() const { return status != QueryStatus::kOk; }
};

// UserInsertion -> [CreateUser]; DishInfo -> [FetchDish] (+ FetchUserNeeds
// when a user is named); MealPreparation -> [FetchUserNeeds,
// FilterSafeDishes]. Throws UnsupportedIntentError for out_of_scope and
// InvalidConfigError when a required parameter is missing or unparseable.
std::vector<QueryIR> compile(const Intent& intent);

// Missing entities and rejected inserts come back as incomplete results.
QueryResult execute(const QueryIR& q, KnowledgeStore& store);

// Cypher-flavoured single line, e.g.
//   MATCH (d:Dish {name: "rice"}) OPTIONAL MATCH (d)-[:has_allergen]->(a:Allergen) RETURN d, collect(a.name)
std::string render_query_text(const QueryIR& q);

// A binding as it appears inside render_query_text.
std::string binding_text(const BindingValue& v);

// "Marco" from "marco", "Anna-Lisa" from "anna-lisa", "D'Angelo" from "d'angelo".
std::string display_name(std::string_view name);

}  // namespace advisor

#endif  // ADVISOR_QUERY_HPP_
