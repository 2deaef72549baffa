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

#ifndef ADVISOR_ACCEPTANCE_CRITERIA_HPP_
#define ADVISOR_ACCEPTANCE_CRITERIA_HPP_

#include <string>
#include <vector>

namespace advisor::acceptance {

struct CriterionResult {
  std::string id;  // filled in by the driver
  bool passed = false;
  std::string detail;
};

CriterionResult solver_optimality();
CriterionResult threshold_soundness();
CriterionResult allergen_safety();
CriterionResult scaling_benchmark();
CriterionResult dialogue_correctness();
CriterionResult intent_accuracy();
CriterionResult state_machine();
CriterionResult timing_instrumentation();
CriterionResult offline_deterministic();

}  // namespace advisor::acceptance

#endif  // ADVISOR_ACCEPTANCE_CRITERIA_HPP_
