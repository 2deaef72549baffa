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

#ifndef ADVISOR_KNOWLEDGE_STORE_HPP_
#define ADVISOR_KNOWLEDGE_STORE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "advisor/domain.hpp"

namespace advisor {

inline constexpr int kSnapshotSchemaVersion = 1;

// Plain copy of the whole graph. Users and dishes are ordered by canonical
// name.
struct GraphSnapshot {
  int schema_version = kSnapshotSchemaVersion;
  std::vector<UserProfile> users;
  std::vector<Dish> dishes;

  friend bool operator==(const GraphSnapshot&, const GraphSnapshot&) = default;
};

// Serialized snapshot document. Byte-stable: keys sorted, numbers printed with
// one decimal place.
std::string serialize_snapshot(const GraphSnapshot& s);
// Throws SchemaVersionMismatchError or ParseError (record index + field path).
GraphSnapshot parse_snapshot(std::string_view text);

// In-process property graph: users, dishes and allergens, linked by
// has_allergen (dish -> allergen), is_allergic_to (user -> allergen) and
// has_nutritional_needs (user -> targets).
//
// Reader-writer: any number of concurrent readers or one writer. Each
// mutation is atomic.
class KnowledgeStore {
 public:
  KnowledgeStore() = default;
  explicit KnowledgeStore(const GraphSnapshot& s);

  KnowledgeStore(const KnowledgeStore&) = delete;
  KnowledgeStore& operator=(const KnowledgeStore&) = delete;

  // The id field of the argument is ignored; a fresh id is assigned.
  UserId insert_user(const UserProfile& p);
  DishId insert_dish(const Dish& d);

  // Case and whitespace insensitive lookups. Throw NotFoundError.
  Dish get_dish(std::string_view name) const;
  UserProfile get_user(std::string_view name) const;

  bool has_user(std::string_view name) const;
  bool has_dish(std::string_view name) const;

  // Dishes sharing no allergen with `user.allergies`, canonical name ascending.
  std::vector<Dish> dishes_safe_for(const UserProfile& user) const;
  std::vector<Dish> all_dishes() const;

  std::size_t user_count() const;
  std::size_t dish_count() const;

  GraphSnapshot snapshot() const;
  // FNV-1a over the serialized snapshot.
  std::uint64_t fingerprint() const;

  // Throws IoError.
  void save_snapshot(const std::filesystem::path& path) const;
  static GraphSnapshot load_snapshot(const std::filesystem::path& path);

 private:
  GraphSnapshot snapshot_locked() const;

  mutable std::shared_mutex mu_;
  std::map<std::string, UserProfile> users_;  // keyed by canonical name
  std::map<std::string, Dish> dishes_;
  std::uint64_t next_user_id_ = 1;
  std::uint64_t next_dish_id_ = 1;
};

// Bulk dish loading for `advisor ingest`.
struct IngestIssue {
  // 1-based line for line-oriented input; 0-based record index for a
  // document.
  std::size_t location = 0;
  bool is_line = false;
  std::string message;
};

struct IngestReport {
  std::size_t loaded = 0;
  std::vector<IngestIssue> issues;
};

// Accepts either one JSON record per line, or a single document: an array of
// records or an object with a "dishes" array. Record fields: name, calories,
// carbs, proteins, fats, allergens[] (and an ignored optional id). Bad records
// are reported and skipped; the rest are inserted.
IngestReport ingest_dishes(std::string_view text, KnowledgeStore& store);

}  // namespace advisor

#endif  // ADVISOR_KNOWLEDGE_STORE_HPP_
