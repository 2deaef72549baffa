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

#include "advisor/bench.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include <fmt/format.h>

#include "advisor/instances.hpp"

namespace advisor {

std::vector<BenchRow> run_bench(const BenchSpec& spec) {
  std::vector<BenchRow> rows;
  if (spec.sizes.empty()) return rows;
  const auto largest = *std::max_element(spec.sizes.begin(), spec.sizes.end());
  SolverConfig cfg;
  cfg.max_dishes = spec.max_dishes;
  InstanceOptions opts;
  opts.target_dishes = spec.max_dishes;
  for (int rep = 0; rep < spec.repetitions; ++rep) {
    InstanceGenerator gen(spec.seed + static_cast<std::uint64_t>(rep));
    const auto inst = gen.make(largest, opts);
    for (const auto n : spec.sizes) {
      const std::span<const Dish> dishes(inst.dishes.data(), n);
      const auto report = solve(dishes, inst.targets, cfg);
      BenchRow row;
      row.n = n;
      row.k = spec.max_dishes;
      row.repetition = rep;
      row.elapsed_seconds = report.elapsed_seconds;
      row.explored_nodes = report.explored_nodes;
      row.pruned_nodes = report.pruned_nodes;
      if (!report.solutions.empty()) row.best_score = fmt::format("{:.6f}", report.solutions.front().score().value());
      rows.push_back(row);
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out(kBenchCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += fmt::format("{},{},{:.6f},{},{},{}\n", r.n, r.k, r.elapsed_seconds, r.explored_nodes, r.pruned_nodes,
                       r.best_score);
  }
  return out;
}

std::vector<std::string> validate_bench_csv(std::string_view csv) {
  std::vector<std::string> problems;
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || line != kBenchCsvHeader) {
    problems.push_back(fmt::format("header is '{}', expected '{}'", line, kBenchCsvHeader));
    return problems;
  }
  static const std::regex integer(R"(\d+)");
  static const std::regex decimal(R"(\d+(\.\d+)?)");
  std::size_t line_no = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ++rows;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 6) {
      problems.push_back(fmt::format("line {}: {} columns, expected 6", line_no, cells.size()));
      continue;
    }
    const auto check = [&](std::size_t i, const std::regex& re, const char* what) {
      if (!std::regex_match(cells[i], re)) {
        problems.push_back(fmt::format("line {}: column {} '{}' is not {}", line_no, i + 1, cells[i], what));
      }
    };
    check(0, integer, "an integer");
    check(1, integer, "an integer");
    check(2, decimal, "a decimal");
    check(3, integer, "an integer");
    check(4, integer, "an integer");
    if (!cells[5].empty()) check(5, decimal, "a decimal");
  }
  if (rows == 0) problems.emplace_back("no data rows");
  return problems;
}

std::map<std::size_t, double> median_elapsed(const std::vector<BenchRow>& rows) {
  std::map<std::size_t, std::vector<double>> by_n;
  for (const auto& r : rows) by_n[r.n].push_back(r.elapsed_seconds);
  std::map<std::size_t, double> out;
  for (auto& [n, v] : by_n) {
    std::sort(v.begin(), v.end());
    const auto mid = v.size() / 2;
    out[n] = v.size() % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
  }
  return out;
}

const std::map<std::size_t, double>& reference_seconds() {
  static const std::map<std::size_t, double> ref = {{50, 0.25}, {100, 1.46}, {150, 3.54}, {200, 6.37}, {250, 8.63}};
  return ref;
}

bool same_ranking(const SolverReport& a, const SolverReport& b, std::string* why) {
  const auto fail = [&](std::string msg) {
    if (why != nullptr) *why = std::move(msg);
    return false;
  };
  if (a.status != b.status) return fail("status differs");
  if (a.solutions.size() != b.solutions.size()) {
    return fail(fmt::format("{} vs {} solutions", a.solutions.size(), b.solutions.size()));
  }
  for (std::size_t i = 0; i < a.solutions.size(); ++i) {
    const auto& x = a.solutions[i];
    const auto& y = b.solutions[i];
    if (!(x.score() == y.score())) return fail(fmt::format("rank {}: scores differ", i + 1));
    if (x.dish_ids != y.dish_ids) return fail(fmt::format("rank {}: dish sets differ", i + 1));
  }
  return true;
}

VerifyCase verify_seed(std::uint64_t seed, std::size_t max_n) {
  VerifyCase c;
  c.seed = seed;
  c.n = 3 + static_cast<std::size_t>(seed % (max_n - 2));
  c.k = 1 + static_cast<int>(seed % 3);
  InstanceGenerator gen(seed);
  InstanceOptions opts;
  opts.target_dishes = c.k;
  const auto inst = gen.make(c.n, opts);
  SolverConfig cfg;
  cfg.max_dishes = c.k;
  const auto fast = solve(inst.dishes, inst.targets, cfg);
  const auto slow = brute_force_oracle(inst.dishes, inst.targets, cfg);
  c.agree = same_ranking(fast, slow, &c.detail);
  if (c.agree) c.detail = fmt::format("{} solution(s)", fast.solutions.size());
  return c;
}

}  // namespace advisor
