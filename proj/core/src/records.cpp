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

#include "advisor/records.hpp"

#include <cmath>
#include <initializer_list>
#include <string_view>

#include <fmt/format.h>

namespace advisor {

using nlohmann::json;

json tenths_to_json(Nutrients::Tenths t) { return static_cast<double>(t) / 10.0; }

json nutrients_to_json(const Nutrients& n) {
  json j = json::object();
  for (const auto k : kAllNutrients) j[std::string(nutrient_name(k))] = tenths_to_json(n.tenths(k));
  return j;
}

namespace {

json allergens_to_json(const AllergenSet& s) {
  json arr = json::array();
  for (const auto& a : s) arr.push_back(a.name());
  return arr;
}

[[noreturn]] void fail(std::size_t record, const std::string& where, std::string_view field,
                       std::string_view what) {
  const auto path = fmt::format("{}.{}", where, field);
  throw ParseError(fmt::format("{}: {}", path, what), record, path);
}

void reject_unknown(const json& j, std::size_t record, const std::string& where,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const auto a : allowed) ok = ok || key == a;
    if (!ok) fail(record, where, key, "unknown field");
  }
}

const json& require(const json& j, std::size_t record, const std::string& where, const char* field) {
  if (!j.contains(field)) fail(record, where, field, "missing");
  return j.at(field);
}

Nutrients::Tenths number_field(const json& j, std::size_t record, const std::string& where, const char* field) {
  const auto& v = require(j, record, where, field);
  if (!v.is_number()) fail(record, where, field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(record, where, field, "expected a finite number");
  return static_cast<Nutrients::Tenths>(std::llround(d * 10.0));
}

std::string name_field(const json& j, std::size_t record, const std::string& where) {
  const auto& v = require(j, record, where, "name");
  if (!v.is_string()) fail(record, where, "name", "expected a string");
  auto s = v.get<std::string>();
  if (canonical_token(s).empty()) fail(record, where, "name", "must not be empty");
  return s;
}

std::uint64_t id_field(const json& j, std::size_t record, const std::string& where) {
  const auto& v = require(j, record, where, "id");
  if (!v.is_number_unsigned()) fail(record, where, "id", "expected a positive integer");
  return v.get<std::uint64_t>();
}

AllergenSet allergen_field(const json& j, std::size_t record, const std::string& where, const char* field) {
  AllergenSet out;
  if (!j.contains(field)) return out;
  const auto& arr = j.at(field);
  if (!arr.is_array()) fail(record, where, field, "expected an array of strings");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto sub = fmt::format("{}[{}]", field, i);
    if (!arr[i].is_string()) fail(record, where, sub, "expected a string");
    const auto token = canonical_token(arr[i].get<std::string>());
    if (token.empty()) fail(record, where, sub, "empty allergen");
    out.insert(Allergen::canonicalize(token));
  }
  return out;
}

}  // namespace

json dish_to_json(const Dish& d, bool with_id) {
  json j = json::object();
  if (with_id) j["id"] = d.id.value;
  j["name"] = d.name;
  for (const auto k : kAllNutrients) j[std::string(nutrient_name(k))] = tenths_to_json(d.nutrients.tenths(k));
  j["allergens"] = allergens_to_json(d.allergens);
  return j;
}

json user_to_json(const UserProfile& u) {
  json j = json::object();
  j["id"] = u.id.value;
  j["name"] = u.name;
  j["needs"] = nutrients_to_json(u.needs);
  j["allergies"] = allergens_to_json(u.allergies);
  return j;
}

Nutrients nutrients_from_json(const json& j, std::size_t record, const std::string& where) {
  if (!j.is_object()) throw ParseError(fmt::format("{}: expected an object", where), record, where);
  reject_unknown(j, record, where, {"calories", "carbs", "proteins", "fats"});
  Nutrients n;
  for (const auto k : kAllNutrients) {
    n.set_tenths(k, number_field(j, record, where, std::string(nutrient_name(k)).c_str()));
  }
  return n;
}

Dish dish_from_json(const json& j, std::size_t record, const std::string& where, bool require_id) {
  if (!j.is_object()) throw ParseError(fmt::format("{}: expected an object", where), record, where);
  reject_unknown(j, record, where, {"id", "name", "calories", "carbs", "proteins", "fats", "allergens"});
  Dish d;
  if (require_id || j.contains("id")) d.id = DishId{id_field(j, record, where)};
  d.name = name_field(j, record, where);
  for (const auto k : kAllNutrients) {
    d.nutrients.set_tenths(k, number_field(j, record, where, std::string(nutrient_name(k)).c_str()));
  }
  d.allergens = allergen_field(j, record, where, "allergens");
  return d;
}

UserProfile user_from_json(const json& j, std::size_t record, const std::string& where) {
  if (!j.is_object()) throw ParseError(fmt::format("{}: expected an object", where), record, where);
  reject_unknown(j, record, where, {"id", "name", "needs", "allergies"});
  UserProfile u;
  u.id = UserId{id_field(j, record, where)};
  u.name = name_field(j, record, where);
  u.needs = nutrients_from_json(require(j, record, where, "needs"), record, where + ".needs");
  u.allergies = allergen_field(j, record, where, "allergies");
  return u;
}

}  // namespace advisor
