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

#ifndef ADVISOR_DOMAIN_HPP_
#define ADVISOR_DOMAIN_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "advisor/errors.hpp"

namespace advisor {

// The four tracked nutritional quantities, in storage order.
enum class Nutrient : std::uint8_t { kCalories = 0, kCarbs = 1, kProteins = 2, kFats = 3 };

inline constexpr std::array<Nutrient, 4> kAllNutrients = {
    Nutrient::kCalories, Nutrient::kCarbs, Nutrient::kProteins, Nutrient::kFats};

// "calories", "carbs", "proteins", "fats".
std::string_view nutrient_name(Nutrient n);
// "kcal" for calories, "g" otherwise.
std::string_view nutrient_unit(Nutrient n);

// Nutrient amounts in fixed point: one decimal place, i.e. decikcal for
// calories and decigrams for the three macronutrients. Every arithmetic
// operation is exact, so totals are order independent.
class Nutrients {
 public:
  using Tenths = std::int64_t;

  constexpr Nutrients() = default;
  constexpr explicit Nutrients(std::array<Tenths, 4> tenths) : tenths_(tenths) {}

  // Rounds each value to the nearest tenth. Throws std::invalid_argument for
  // non-finite input.
  static Nutrients from_values(double calories, double carbs, double proteins, double fats);

  constexpr Tenths tenths(Nutrient n) const { return tenths_[static_cast<std::size_t>(n)]; }
  constexpr void set_tenths(Nutrient n, Tenths v) { tenths_[static_cast<std::size_t>(n)] = v; }
  double value(Nutrient n) const { return static_cast<double>(tenths(n)) / 10.0; }

  double calories() const { return value(Nutrient::kCalories); }
  double carbs() const { return value(Nutrient::kCarbs); }
  double proteins() const { return value(Nutrient::kProteins); }
  double fats() const { return value(Nutrient::kFats); }

  constexpr const std::array<Tenths, 4>& raw() const { return tenths_; }

  constexpr Nutrients& operator+=(const Nutrients& o) {
    for (std::size_t i = 0; i < 4; ++i) tenths_[i] += o.tenths_[i];
    return *this;
  }
  friend constexpr Nutrients operator+(Nutrients a, const Nutrients& b) { return a += b; }
  friend constexpr bool operator==(const Nutrients&, const Nutrients&) = default;

 private:
  std::array<Tenths, 4> tenths_{};
};

// Formats a fixed-point tenths value with exactly one decimal place
// ("450.0", "-0.5").
std::string format_tenths(Nutrients::Tenths tenths);

// Lowercase, trim, collapse inner whitespace runs to one space. Shared by
// allergen tokens and entity names. Does not reject empty results.
std::string canonical_token(std::string_view raw);

class Allergen {
 public:
  // Throws EmptyTokenError when `raw` is blank.
  static Allergen canonicalize(std::string_view raw);

  const std::string& name() const { return name_; }

  friend auto operator<=>(const Allergen&, const Allergen&) = default;
  friend bool operator==(const Allergen&, const Allergen&) = default;

 private:
  explicit Allergen(std::string name) : name_(std::move(name)) {}
  std::string name_;
};

using AllergenSet = std::set<Allergen>;

// Canonicalizes every token; duplicates collapse.
AllergenSet make_allergens(std::span<const std::string> raw);
AllergenSet make_allergens(std::initializer_list<std::string_view> raw);

struct DishId {
  std::uint64_t value = 0;
  friend auto operator<=>(const DishId&, const DishId&) = default;
};

struct UserId {
  std::uint64_t value = 0;
  friend auto operator<=>(const UserId&, const UserId&) = default;
};

struct Dish {
  DishId id;
  std::string name;
  Nutrients nutrients;
  AllergenSet allergens;

  friend bool operator==(const Dish&, const Dish&) = default;
};

struct UserProfile {
  UserId id;
  std::string name;
  Nutrients needs;
  AllergenSet allergies;

  friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

enum class ViolationKind : std::uint8_t { kEmptyName, kNonPositiveTarget, kNegativeNutrient };

struct Violation {
  ViolationKind kind;
  // Set for kNonPositiveTarget / kNegativeNutrient.
  Nutrient nutrient = Nutrient::kCalories;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::string describe(const Violation& v);

// Every invariant the profile breaks; empty means valid.
std::vector<Violation> validate_profile(const UserProfile& p);
std::vector<Violation> validate_dish(const Dish& d);

class InvalidProfileError : public Error {
 public:
  explicit InvalidProfileError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

class InvalidDishError : public Error {
 public:
  explicit InvalidDishError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Sum of nutrients across `dishes`.
Nutrients total_nutrients(std::span<const Dish> dishes);

}  // namespace advisor

#endif  // ADVISOR_DOMAIN_HPP_
