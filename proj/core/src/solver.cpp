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

#include "advisor/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

namespace advisor {

namespace {

using Tenths = Nutrients::Tenths;
using Wide = Score::Wide;

constexpr Wide kPpm = 1'000'000;

Wide abs_wide(Wide v) { return v < 0 ? -v : v; }

void require_positive_targets(const Nutrients& targets) {
  for (const auto n : kAllNutrients) {
    if (targets.tenths(n) <= 0) {
      throw InvalidConfigError(fmt::format("target {} must be positive", nutrient_name(n)));
    }
  }
}

// Product of the other three targets, so that sum_i |d_i| * cofactor_i is the
// score numerator over the product of all four.
std::array<Wide, 4> cofactors(const Nutrients& targets) {
  std::array<Wide, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    Wide p = 1;
    for (std::size_t j = 0; j < 4; ++j) {
      if (j != i) p *= targets.raw()[j];
    }
    out[i] = p;
  }
  return out;
}

Wide target_product(const Nutrients& targets) {
  Wide p = 1;
  for (const auto t : targets.raw()) p *= t;
  return p;
}

}  // namespace

void SolverConfig::validate() const {
  if (max_dishes < 1) throw InvalidConfigError("max_dishes must be >= 1");
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidConfigError("threshold must lie in (0, 1)");
  if (max_solutions < 1) throw InvalidConfigError("max_solutions must be >= 1");
  for (const auto n : kAllNutrients) {
    if (group_bins.tenths(n) <= 0) {
      throw InvalidConfigError(fmt::format("group bin for {} must be positive", nutrient_name(n)));
    }
  }
}

std::int64_t SolverConfig::threshold_ppm() const { return std::llround(threshold * 1e6); }

double Score::value() const {
  return static_cast<double>(static_cast<long double>(num_) / static_cast<long double>(den_));
}

bool operator==(const Score& a, const Score& b) { return (a <=> b) == std::strong_ordering::equal; }

std::strong_ordering operator<=>(const Score& a, const Score& b) {
  if (a.den_ == b.den_) return a.num_ <=> b.num_;
  Wide lhs = 0;
  Wide rhs = 0;
  if (!__builtin_mul_overflow(a.num_, b.den_, &lhs) && !__builtin_mul_overflow(b.num_, a.den_, &rhs)) {
    return lhs <=> rhs;
  }
  const auto x = static_cast<long double>(a.num_) / static_cast<long double>(a.den_);
  const auto y = static_cast<long double>(b.num_) / static_cast<long double>(b.den_);
  if (x < y) return std::strong_ordering::less;
  if (y < x) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

ScoreBreakdown score_totals(const Nutrients& totals, const Nutrients& targets) {
  require_positive_targets(targets);
  const auto cof = cofactors(targets);
  ScoreBreakdown out;
  Wide num = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const Tenths diff = totals.raw()[i] - targets.raw()[i];
    out.differences[i] = diff;
    out.deviations[i] = std::abs(static_cast<double>(diff)) / static_cast<double>(targets.raw()[i]);
    num += abs_wide(diff) * cof[i];
  }
  out.score = Score(num, target_product(targets));
  return out;
}

ScoreBreakdown score(std::span<const Dish> combination, const Nutrients& targets) {
  return score_totals(total_nutrients(combination), targets);
}

namespace {

bool within_ppm(const Nutrients& totals, const Nutrients& targets, Wide ppm) {
  for (std::size_t i = 0; i < 4; ++i) {
    const Wide diff = abs_wide(static_cast<Wide>(totals.raw()[i]) - targets.raw()[i]);
    if (diff * kPpm > ppm * targets.raw()[i]) return false;
  }
  return true;
}

}  // namespace

bool within_threshold(const Nutrients& totals, const Nutrients& targets, const SolverConfig& config) {
  return within_ppm(totals, targets, config.threshold_ppm());
}

bool feasible(std::span<const Dish> combination, const Nutrients& targets, const SolverConfig& config) {
  require_positive_targets(targets);
  return within_threshold(total_nutrients(combination), targets, config);
}

bool ranks_before(const MealSolution& a, const MealSolution& b) {
  if (const auto c = a.score() <=> b.score(); c != 0) return c < 0;
  if (a.dish_names != b.dish_names) return a.dish_names < b.dish_names;
  return a.dish_ids < b.dish_ids;
}

std::vector<DishClass> prune_groups(std::span<const Dish> dishes, const SolverConfig& config) {
  std::map<std::array<std::int64_t, 4>, DishClass, std::greater<>> cells;
  for (std::size_t i = 0; i < dishes.size(); ++i) {
    std::array<std::int64_t, 4> cell{};
    for (std::size_t k = 0; k < 4; ++k) {
      const auto v = dishes[i].nutrients.raw()[k];
      const auto bin = config.group_bins.raw()[k];
      cell[k] = v >= 0 ? v / bin : -((-v + bin - 1) / bin);  // floor division
    }
    auto& cls = cells[cell];
    cls.cell = cell;
    cls.members.push_back(i);
  }
  std::vector<DishClass> out;
  out.reserve(cells.size());
  for (auto& [_, cls] : cells) {
    cls.representative = *std::min_element(cls.members.begin(), cls.members.end(), [&](std::size_t a, std::size_t b) {
      const auto na = canonical_token(dishes[a].name);
      const auto nb = canonical_token(dishes[b].name);
      return na != nb ? na < nb : dishes[a].id < dishes[b].id;
    });
    out.push_back(std::move(cls));
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

MealSolution make_solution(std::span<const Dish> dishes, std::span<const std::size_t> picked,
                           const Nutrients& totals, const Nutrients& targets) {
  MealSolution s;
  for (const auto i : picked) {
    s.dish_ids.push_back(dishes[i].id);
    s.dish_names.push_back(canonical_token(dishes[i].name));
  }
  std::sort(s.dish_ids.begin(), s.dish_ids.end());
  std::sort(s.dish_names.begin(), s.dish_names.end());
  s.totals = totals;
  s.breakdown = score_totals(totals, targets);
  return s;
}

// Bounded, sorted list of the best solutions seen so far.
class TopList {
 public:
  explicit TopList(std::size_t capacity) : capacity_(capacity) {}

  bool full() const { return items_.size() >= capacity_; }
  const Score& cutoff() const { return items_.back().score(); }

  void offer(MealSolution s) {
    if (full() && !ranks_before(s, items_.back())) return;
    const auto pos = std::upper_bound(items_.begin(), items_.end(), s, ranks_before);
    items_.insert(pos, std::move(s));
    if (items_.size() > capacity_) items_.pop_back();
  }

  std::vector<MealSolution> take() { return std::move(items_); }

 private:
  std::size_t capacity_;
  std::vector<MealSolution> items_;
};

class BranchAndBound {
 public:
  BranchAndBound(std::span<const Dish> dishes, const Nutrients& targets, const SolverConfig& config)
      : dishes_(dishes),
        targets_(targets.raw()),
        cof_(cofactors(targets)),
        ppm_(config.threshold_ppm()),
        depth_limit_(static_cast<std::size_t>(config.max_dishes)),
        check_bounds_(config.check_bounds),
        best_(static_cast<std::size_t>(config.max_solutions)),
        target_nutrients_(targets) {
    build_order(config);
    build_tables();
  }

  SolverReport run() {
    SolverReport report;
    report.explored_nodes = 1;  // root
    explored_ = &report.explored_nodes;
    pruned_ = &report.pruned_nodes;
    violations_ = &report.bound_violations;
    Totals zero{};
    dfs(0, 0, zero, 0);
    report.solutions = best_.take();
    report.status = report.solutions.empty() ? SolveStatus::kNoFeasibleSolution : SolveStatus::kOk;
    return report;
  }

 private:
  using Totals = std::array<Tenths, 4>;

  // Dishes grouped by class, classes in prune_groups order, members by
  // calories descending then canonical name.
  void build_order(const SolverConfig& config) {
    for (const auto& cls : prune_groups(dishes_, config)) {
      auto members = cls.members;
      std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
        const auto ca = dishes_[a].nutrients.tenths(Nutrient::kCalories);
        const auto cb = dishes_[b].nutrients.tenths(Nutrient::kCalories);
        if (ca != cb) return ca > cb;
        const auto na = canonical_token(dishes_[a].name);
        const auto nb = canonical_token(dishes_[b].name);
        return na != nb ? na < nb : dishes_[a].id < dishes_[b].id;
      });
      const std::size_t begin = order_.size();
      order_.insert(order_.end(), members.begin(), members.end());
      class_end_.resize(order_.size(), order_.size());
      class_begin_.resize(order_.size(), begin);
    }
  }

  void build_tables() {
    const std::size_t n = order_.size();
    const std::size_t slots = depth_limit_ + 1;
    values_.resize(n);
    for (std::size_t p = 0; p < n; ++p) values_[p] = dishes_[order_[p]].nutrients.raw();

    // class_min_[p]: component-wise minimum over [p, class_end).
    class_min_.resize(n);
    for (std::size_t p = n; p-- > 0;) {
      class_min_[p] = values_[p];
      if (p + 1 < class_end_[p]) {
        for (std::size_t k = 0; k < 4; ++k) class_min_[p][k] = std::min(class_min_[p][k], class_min_[p + 1][k]);
      }
    }

    // top_sum(p, r)[k]: sum of the r largest values of nutrient k over
    // positions [p, n), taken independently per nutrient.
    top_.assign((n + 1) * slots, Totals{});
    std::array<std::vector<Tenths>, 4> largest;
    for (std::size_t p = n; p-- > 0;) {
      for (std::size_t k = 0; k < 4; ++k) {
        auto& v = largest[k];
        v.insert(std::upper_bound(v.begin(), v.end(), values_[p][k], std::greater<>()), values_[p][k]);
        if (v.size() > depth_limit_) v.pop_back();
        Tenths acc = 0;
        for (std::size_t r = 0; r < slots; ++r) {
          top_[p * slots + r][k] = acc;
          if (r < v.size()) acc += v[r];
        }
      }
    }
  }

  const Totals& top_sum(std::size_t pos, std::size_t r) const { return top_[pos * (depth_limit_ + 1) + r]; }

  bool over_infeasible(Tenths total, std::size_t k) const {
    return (static_cast<Wide>(total) - targets_[k]) * kPpm > static_cast<Wide>(ppm_) * targets_[k];
  }

  bool under_infeasible(Tenths reach, std::size_t k) const {
    return (static_cast<Wide>(targets_[k]) - reach) * kPpm > static_cast<Wide>(ppm_) * targets_[k];
  }

  // Admissible bound on the score of any meal containing `base` plus up to r
  // more dishes whose per-nutrient sums are at most `extra`. Nutrients
  // already over target can only grow; nutrients under target can at best
  // close the gap left after `extra`.
  Wide lower_bound(const Totals& base, const Totals& extra) const {
    Wide lb = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const Tenths over = base[k] - targets_[k];
      const Tenths under = targets_[k] - base[k] - extra[k];
      if (over > 0) lb += static_cast<Wide>(over) * cof_[k];
      else if (under > 0) lb += static_cast<Wide>(under) * cof_[k];
    }
    return lb;
  }

  void dfs(std::size_t start, std::size_t depth, const Totals& totals, Wide chain_bound) {
    if (depth >= depth_limit_) return;
    const std::size_t n = order_.size();
    const std::size_t remaining = depth_limit_ - depth - 1;  // slots left after the child

    for (std::size_t j = start; j < n;) {
      if (j == start || j == class_begin_[j]) {
        // Anything picked from [j, n) plus `remaining` more adds at most
        // top_sum(j, remaining + 1).
        const Totals& reach = top_sum(j, remaining + 1);
        bool dead = false;
        for (std::size_t k = 0; k < 4 && !dead; ++k) dead = under_infeasible(totals[k] + reach[k], k);
        if (dead) {
          *pruned_ += n - j;
          return;
        }
        Totals floor = totals;
        for (std::size_t k = 0; k < 4; ++k) floor[k] += class_min_[j][k];
        bool skip = false;
        for (std::size_t k = 0; k < 4 && !skip; ++k) skip = over_infeasible(floor[k], k);
        if (!skip && best_.full()) {
          Totals gap{};
          for (std::size_t k = 0; k < 4; ++k) gap[k] = reach[k] - class_min_[j][k];
          skip = lower_bound(floor, gap) > best_.cutoff().numerator();
        }
        if (skip) {
          *pruned_ += class_end_[j] - j;
          j = class_end_[j];
          continue;
        }
      }

      Totals child = totals;
      for (std::size_t k = 0; k < 4; ++k) child[k] += values_[j][k];
      const Totals& extra = top_sum(j + 1, remaining);
      bool dead = false;
      for (std::size_t k = 0; k < 4 && !dead; ++k) {
        dead = over_infeasible(child[k], k) || under_infeasible(child[k] + extra[k], k);
      }
      const Wide bound = dead ? 0 : lower_bound(child, extra);
      if (dead || (best_.full() && bound > best_.cutoff().numerator())) {
        ++*pruned_;
        ++j;
        continue;
      }

      ++*explored_;
      picked_.push_back(order_[j]);
      const Wide chain = std::max(chain_bound, bound);
      const Nutrients child_nutrients(child);
      if (within_ppm(child_nutrients, target_nutrients_, ppm_)) {
        auto sol = make_solution(dishes_, picked_, child_nutrients, target_nutrients_);
        if (check_bounds_ && sol.score().numerator() < chain) ++*violations_;
        best_.offer(std::move(sol));
      }
      if (remaining > 0) dfs(j + 1, depth + 1, child, chain);
      picked_.pop_back();
      ++j;
    }
  }

  std::span<const Dish> dishes_;
  Totals targets_;
  std::array<Wide, 4> cof_;
  std::int64_t ppm_;
  std::size_t depth_limit_;
  bool check_bounds_;
  TopList best_;
  Nutrients target_nutrients_;

  std::vector<std::size_t> order_;
  std::vector<std::size_t> class_begin_;
  std::vector<std::size_t> class_end_;
  std::vector<Totals> values_;
  std::vector<Totals> class_min_;
  std::vector<Totals> top_;
  std::vector<std::size_t> picked_;

  std::uint64_t* explored_ = nullptr;
  std::uint64_t* pruned_ = nullptr;
  std::uint64_t* violations_ = nullptr;
};

void check_inputs(std::span<const Dish> dishes, const Nutrients& targets, const SolverConfig& config) {
  config.validate();
  require_positive_targets(targets);
  for (const auto& d : dishes) {
    if (auto v = validate_dish(d); !v.empty()) throw InvalidDishError(std::move(v));
  }
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

SolverReport solve(std::span<const Dish> dishes, const Nutrients& targets, const SolverConfig& config) {
  const auto t0 = Clock::now();
  check_inputs(dishes, targets, config);
  BranchAndBound search(dishes, targets, config);
  auto report = search.run();
  report.elapsed_seconds = seconds_since(t0);
  return report;
}

SolverReport brute_force_oracle(std::span<const Dish> dishes, const Nutrients& targets,
                                const SolverConfig& config) {
  const auto t0 = Clock::now();
  if (dishes.size() > kOracleMaxDishes) {
    throw TooLargeError(fmt::format("brute-force oracle accepts at most {} dishes, got {}", kOracleMaxDishes,
                                    dishes.size()));
  }
  check_inputs(dishes, targets, config);

  SolverReport report;
  std::vector<MealSolution> all;
  std::vector<std::size_t> picked;
  std::vector<Dish> combo;
  const std::size_t limit = static_cast<std::size_t>(config.max_dishes);

  // Recursive enumeration of index combinations in input order.
  const auto enumerate = [&](auto&& self, std::size_t start) -> void {
    for (std::size_t i = start; i < dishes.size(); ++i) {
      picked.push_back(i);
      combo.push_back(dishes[i]);
      ++report.explored_nodes;
      if (feasible(combo, targets, config)) {
        all.push_back(make_solution(dishes, picked, total_nutrients(combo), targets));
      }
      if (picked.size() < limit) self(self, i + 1);
      combo.pop_back();
      picked.pop_back();
    }
  };
  enumerate(enumerate, 0);

  std::sort(all.begin(), all.end(), ranks_before);
  if (all.size() > static_cast<std::size_t>(config.max_solutions)) all.resize(config.max_solutions);
  report.solutions = std::move(all);
  report.status = report.solutions.empty() ? SolveStatus::kNoFeasibleSolution : SolveStatus::kOk;
  report.elapsed_seconds = seconds_since(t0);
  return report;
}

}  // namespace advisor
