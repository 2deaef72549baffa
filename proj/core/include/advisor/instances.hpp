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

#ifndef ADVISOR_INSTANCES_HPP_
#define ADVISOR_INSTANCES_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "advisor/domain.hpp"

namespace advisor {

// Seeded random dish catalogues for benchmarks, verification and property
// tests. Only std::mt19937_64 output is consumed (no std distributions), so
// a seed yields the same instance on every platform.
struct InstanceOptions {
  // Probability that a dish copies the nutrients of an earlier dish exactly,
  // which exercises tie-breaking.
  double duplicate_rate = 0.1;
  // Each dish draws up to this many allergens from a fixed pool.
  int max_allergens_per_dish = 2;
  // Targets are the sum of this many random dishes, jittered by up to 8%.
  int target_dishes = 2;
};

struct Instance {
  std::vector<Dish> dishes;  // ids 1..n, names "dish-0001".. unique
  Nutrients targets;
};

class InstanceGenerator {
 public:
  explicit InstanceGenerator(std::uint64_t seed) : rng_(seed) {}

  Instance make(std::size_t n, const InstanceOptions& options = {});
  // A profile whose allergies are a random subset of the allergen pool.
  UserProfile make_user(const Nutrients& needs, std::size_t max_allergies = 3);

  std::int64_t uniform(std::int64_t lo, std::int64_t hi);  // inclusive
  double unit();                                           // [0, 1)

 private:
  std::mt19937_64 rng_;
};

// Allergen tokens used by the generator.
const std::vector<std::string>& allergen_pool();

}  // namespace advisor

#endif  // ADVISOR_INSTANCES_HPP_
