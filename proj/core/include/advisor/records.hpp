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

// JSON shapes of the domain records, shared by the snapshot format, dish
// ingestion and the HTTP API.

#ifndef ADVISOR_RECORDS_HPP_
#define ADVISOR_RECORDS_HPP_

#include <cstddef>
#include <string>

#include <nlohmann/json.hpp>

#include "advisor/domain.hpp"

namespace advisor {

// Fixed-point tenths as a JSON number with one decimal place.
nlohmann::json tenths_to_json(Nutrients::Tenths t);

// {"calories": .., "carbs": .., "proteins": .., "fats": ..}
nlohmann::json nutrients_to_json(const Nutrients& n);

// {"id", "name", "calories", "carbs", "proteins", "fats", "allergens"}
nlohmann::json dish_to_json(const Dish& d, bool with_id);

// {"id", "name", "needs": {...}, "allergies"}
nlohmann::json user_to_json(const UserProfile& u);

// Parsers throw ParseError(message, record, field) where `where` prefixes the
// field path in messages ("dishes[3]", "line 7"). Unknown fields are
// rejected.
Nutrients nutrients_from_json(const nlohmann::json& j, std::size_t record, const std::string& where);
Dish dish_from_json(const nlohmann::json& j, std::size_t record, const std::string& where, bool require_id);
UserProfile user_from_json(const nlohmann::json& j, std::size_t record, const std::string& where);

}  // namespace advisor

#endif  // ADVISOR_RECORDS_HPP_
