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

// Solver scaling runs and solver-versus-oracle verification, shared by the
// CLI and the acceptance suite.

#ifndef ADVISOR_BENCH_HPP_
#define ADVISOR_BENCH_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "advisor/solver.hpp"

namespace advisor {

struct BenchSpec {
  std::vector<std::size_t> sizes = {50, 100, 150, 200, 250};
  int max_dishes = 3;
  int repetitions = 5;
  std::uint64_t seed = 2024;
};

struct BenchRow {
  std::size_t n = 0;
  int k = 0;
  int repetition = 0;
  double elapsed_seconds = 0.0;
  std::uint64_t explored_nodes = 0;
  std::uint64_t pruned_nodes = 0;
  // Empty when no meal was feasible.
  std::string best_score;
};

// Repetition r draws one dish list of max(sizes) dishes from seed + r; each N
// runs on its first N dishes, so sizes are nested.
std::vector<BenchRow> run_bench(const BenchSpec& spec);

inline constexpr std::string_view kBenchCsvHeader = "N,K,elapsed_seconds,explored_nodes,pruned_nodes,best_score";

std::string bench_csv(const std::vector<BenchRow>& rows);

// Problems with a bench CSV (header, column count, number formats); empty
// when valid.
std::vector<std::string> validate_bench_csv(std::string_view csv);

std::map<std::size_t, double> median_elapsed(const std::vector<BenchRow>& rows);

// Solver times for N = 50..250 of the reference scaling study, for shape
// comparison only.
const std::map<std::size_t, double>& reference_seconds();

struct VerifyCase {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  int k = 0;
  bool agree = false;
  std::string detail;
};

// Instance for seed s: N = 3 + s % (max_n - 2), K = 1 + s % 3.
VerifyCase verify_seed(std::uint64_t seed, std::size_t max_n = 25);

// True when two reports list the same solutions in the same order with
// exactly equal scores.
bool same_ranking(const SolverReport& a, const SolverReport& b, std::string* why = nullptr);

}  // namespace advisor

#endif  // ADVISOR_BENCH_HPP_
