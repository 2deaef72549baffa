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

#include "advisor/domain.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include <fmt/format.h>

namespace advisor {

std::string_view nutrient_name(Nutrient n) {
  switch (n) {
    case Nutrient::kCalories:
      return "calories";
    case Nutrient::kCarbs:
      return "carbs";
    case Nutrient::kProteins:
      return "proteins";
    case Nutrient::kFats:
      return "fats";
  }
  return "?";
}

std::string_view nutrient_unit(Nutrient n) { return n == Nutrient::kCalories ? "kcal" : "g"; }

namespace {

Nutrients::Tenths to_tenths(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("nutrient value must be finite");
  return static_cast<Nutrients::Tenths>(std::llround(v * 10.0));
}

}  // namespace

Nutrients Nutrients::from_values(double calories, double carbs, double proteins, double fats) {
  return Nutrients({to_tenths(calories), to_tenths(carbs), to_tenths(proteins), to_tenths(fats)});
}

std::string format_tenths(Nutrients::Tenths tenths) {
  const auto mag = tenths < 0 ? -tenths : tenths;
  return fmt::format("{}{}.{}", tenths < 0 ? "-" : "", mag / 10, mag % 10);
}

std::string canonical_token(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (const char c : raw) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

Allergen Allergen::canonicalize(std::string_view raw) {
  auto token = canonical_token(raw);
  if (token.empty()) throw EmptyTokenError("allergen token is empty");
  return Allergen(std::move(token));
}

AllergenSet make_allergens(std::span<const std::string> raw) {
  AllergenSet out;
  for (const auto& r : raw) out.insert(Allergen::canonicalize(r));
  return out;
}

AllergenSet make_allergens(std::initializer_list<std::string_view> raw) {
  AllergenSet out;
  for (const auto r : raw) out.insert(Allergen::canonicalize(r));
  return out;
}

std::string describe(const Violation& v) {
  switch (v.kind) {
    case ViolationKind::kEmptyName:
      return "EmptyName";
    case ViolationKind::kNonPositiveTarget:
      return fmt::format("NonPositiveTarget({})", nutrient_name(v.nutrient));
    case ViolationKind::kNegativeNutrient:
      return fmt::format("NegativeNutrient({})", nutrient_name(v.nutrient));
  }
  return "Unknown";
}

std::vector<Violation> validate_profile(const UserProfile& p) {
  std::vector<Violation> out;
  if (canonical_token(p.name).empty()) out.push_back({ViolationKind::kEmptyName});
  for (const auto n : kAllNutrients) {
    if (p.needs.tenths(n) <= 0) out.push_back({ViolationKind::kNonPositiveTarget, n});
  }
  return out;
}

std::vector<Violation> validate_dish(const Dish& d) {
  std::vector<Violation> out;
  if (canonical_token(d.name).empty()) out.push_back({ViolationKind::kEmptyName});
  for (const auto n : kAllNutrients) {
    if (d.nutrients.tenths(n) < 0) out.push_back({ViolationKind::kNegativeNutrient, n});
  }
  return out;
}

namespace {

std::string join_violations(std::string_view prefix, const std::vector<Violation>& vs) {
  std::string msg(prefix);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    msg += i == 0 ? ": " : ", ";
    msg += describe(vs[i]);
  }
  return msg;
}

}  // namespace

InvalidProfileError::InvalidProfileError(std::vector<Violation> violations)
    : Error(join_violations("invalid profile", violations)), violations_(std::move(violations)) {}

InvalidDishError::InvalidDishError(std::vector<Violation> violations)
    : Error(join_violations("invalid dish", violations)), violations_(std::move(violations)) {}

Nutrients total_nutrients(std::span<const Dish> dishes) {
  Nutrients sum;
  for (const auto& d : dishes) sum += d.nutrients;
  return sum;
}

}  // namespace advisor
