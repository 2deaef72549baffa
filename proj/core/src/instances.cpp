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

#include "advisor/instances.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace advisor {

const std::vector<std::string>& allergen_pool() {
  static const std::vector<std::string> pool = {"gluten", "lactose", "nuts",    "eggs",
                                                "soy",    "fish",    "shellfish", "sesame"};
  return pool;
}

std::int64_t InstanceGenerator::uniform(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(rng_() % span);
}

double InstanceGenerator::unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

Instance InstanceGenerator::make(std::size_t n, const InstanceOptions& options) {
  Instance inst;
  inst.dishes.reserve(n);
  const auto& pool = allergen_pool();
  for (std::size_t i = 0; i < n; ++i) {
    Dish d;
    d.id = DishId{i + 1};
    d.name = fmt::format("dish-{:04}", i + 1);
    if (i > 0 && unit() < options.duplicate_rate) {
      d.nutrients = inst.dishes[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(i) - 1))].nutrients;
    } else {
      // Macros in tenths of a gram; calories follow the 4/4/9 rule with +-5%
      // noise.
      const auto carbs = uniform(50, 1100);
      const auto proteins = uniform(20, 550);
      const auto fats = uniform(10, 450);
      const auto base = 4 * carbs + 4 * proteins + 9 * fats;
      const auto calories = base + (base * uniform(-50, 50)) / 1000;
      d.nutrients = Nutrients({calories, carbs, proteins, fats});
    }
    const auto k = uniform(0, options.max_allergens_per_dish);
    for (std::int64_t a = 0; a < k; ++a) {
      d.allergens.insert(Allergen::canonicalize(pool[static_cast<std::size_t>(uniform(0, pool.size() - 1))]));
    }
    inst.dishes.push_back(std::move(d));
  }

  Nutrients targets;
  if (!inst.dishes.empty()) {
    for (int t = 0; t < options.target_dishes; ++t) {
      targets += inst.dishes[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(n) - 1))].nutrients;
    }
  }
  for (const auto nut : kAllNutrients) {
    auto v = targets.tenths(nut);
    v += (v * uniform(-80, 80)) / 1000;
    targets.set_tenths(nut, std::max<Nutrients::Tenths>(v, 10));
  }
  inst.targets = targets;
  return inst;
}

UserProfile InstanceGenerator::make_user(const Nutrients& needs, std::size_t max_allergies) {
  UserProfile u;
  u.name = fmt::format("user-{}", uniform(1, 1'000'000));
  u.needs = needs;
  const auto& pool = allergen_pool();
  const auto k = uniform(0, static_cast<std::int64_t>(max_allergies));
  for (std::int64_t a = 0; a < k; ++a) {
    u.allergies.insert(Allergen::canonicalize(pool[static_cast<std::size_t>(uniform(0, pool.size() - 1))]));
  }
  return u;
}

}  // namespace advisor
