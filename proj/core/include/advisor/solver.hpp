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

// Meal combination search.
//
// A meal is a subset of 1..max_dishes distinct dishes. Its deviation on
// nutrient i is |total_i - target_i| / target_i and its score is the sum of
// the four deviations. A meal is feasible when every deviation is within the
// threshold (boundary inclusive). solve() returns the max_solutions best
// feasible meals ordered by (score, sorted canonical dish names, sorted ids).
//
// All arithmetic is exact: nutrient amounts are integer tenths and a score is
// kept as a rational over the product of the four targets.

#ifndef ADVISOR_SOLVER_HPP_
#define ADVISOR_SOLVER_HPP_

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "advisor/domain.hpp"

namespace advisor {

struct SolverConfig {
  int max_dishes = 3;
  double threshold = 0.10;
  int max_solutions = 5;
  // Quantization widths for grouping, per nutrient.
  Nutrients group_bins = Nutrients({250, 50, 50, 50});
  // Re-checks every lower bound against the scores reached below it and
  // counts failures in SolverReport::bound_violations.
  bool check_bounds = false;

  // Throws InvalidConfigError.
  void validate() const;
  // Threshold in parts per million, the unit used for exact comparisons.
  std::int64_t threshold_ppm() const;
};

// Sum of relative deviations as numerator / denominator, where the denominator
// is the product of the four targets (in tenths). Scores computed against the
// same targets share a denominator and compare exactly.
class Score {
 public:
  using Wide = __int128;

  Score() = default;
  Score(Wide numerator, Wide denominator) : num_(numerator), den_(denominator) {}

  Wide numerator() const { return num_; }
  Wide denominator() const { return den_; }
  double value() const;

  friend bool operator==(const Score& a, const Score& b);
  friend std::strong_ordering operator<=>(const Score& a, const Score& b);

 private:
  Wide num_ = 0;
  Wide den_ = 1;
};

struct ScoreBreakdown {
  // total - target per nutrient, in tenths.
  std::array<Nutrients::Tenths, 4> differences{};
  // |difference| / target per nutrient.
  std::array<double, 4> deviations{};
  Score score;
};

// Precondition: targets strictly positive (throws InvalidConfigError).
ScoreBreakdown score_totals(const Nutrients& totals, const Nutrients& targets);
ScoreBreakdown score(std::span<const Dish> combination, const Nutrients& targets);

bool within_threshold(const Nutrients& totals, const Nutrients& targets, const SolverConfig& config);
bool feasible(std::span<const Dish> combination, const Nutrients& targets, const SolverConfig& config);

struct MealSolution {
  std::vector<DishId> dish_ids;         // ascending
  std::vector<std::string> dish_names;  // canonical names, ascending
  Nutrients totals;
  ScoreBreakdown breakdown;

  const Score& score() const { return breakdown.score; }
};

// Strict ranking order: score, then canonical name tuple, then id tuple.
bool ranks_before(const MealSolution& a, const MealSolution& b);

enum class SolveStatus : std::uint8_t { kOk, kNoFeasibleSolution };

struct SolverReport {
  SolveStatus status = SolveStatus::kNoFeasibleSolution;
  std::vector<MealSolution> solutions;
  std::uint64_t explored_nodes = 0;
  std::uint64_t pruned_nodes = 0;
  std::uint64_t bound_violations = 0;
  double elapsed_seconds = 0.0;
};

// Dishes whose nutrient vectors fall in the same quantization cell
// (floor(value / bin) per nutrient). Members are indices into the input, the
// representative is the member with the lexicographically first canonical
// name.
struct DishClass {
  std::array<std::int64_t, 4> cell{};
  std::size_t representative = 0;
  std::vector<std::size_t> members;
};

// Partition of `dishes` into quantization classes, ordered by cell with
// calories descending first.
std::vector<DishClass> prune_groups(std::span<const Dish> dishes, const SolverConfig& config);

// Depth-first branch and bound. Classes from prune_groups are visited as
// units: a class whose best member cannot beat the current cut-off is skipped
// whole. Pure and deterministic, including node counters.
SolverReport solve(std::span<const Dish> dishes, const Nutrients& targets, const SolverConfig& config);

inline constexpr std::size_t kOracleMaxDishes = 30;

// Exhaustive enumeration of every subset of size 1..max_dishes. Throws
// TooLargeError above kOracleMaxDishes dishes.
SolverReport brute_force_oracle(std::span<const Dish> dishes, const Nutrients& targets,
                                const SolverConfig& config);

}  // namespace advisor

#endif  // ADVISOR_SOLVER_HPP_
