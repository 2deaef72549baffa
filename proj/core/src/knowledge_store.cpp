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

#include "advisor/knowledge_store.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "advisor/records.hpp"

namespace advisor {

using nlohmann::json;

std::string serialize_snapshot(const GraphSnapshot& s) {
  json doc;
  doc["schema_version"] = s.schema_version;
  doc["users"] = json::array();
  for (const auto& u : s.users) doc["users"].push_back(user_to_json(u));
  doc["dishes"] = json::array();
  for (const auto& d : s.dishes) doc["dishes"].push_back(dish_to_json(d, /*with_id=*/true));
  return doc.dump(2) + "\n";
}

GraphSnapshot parse_snapshot(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("snapshot is not valid JSON: {}", e.what()), 0, "");
  }
  if (!doc.is_object()) throw ParseError("snapshot must be an object", 0, "");
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
    throw ParseError("missing integer schema_version", 0, "schema_version");
  }
  const int version = doc["schema_version"].get<int>();
  if (version != kSnapshotSchemaVersion) {
    throw SchemaVersionMismatchError(version, kSnapshotSchemaVersion);
  }
  for (const auto& [key, _] : doc.items()) {
    if (key != "schema_version" && key != "users" && key != "dishes") {
      throw ParseError(fmt::format("unknown top-level field '{}'", key), 0, key);
    }
  }

  GraphSnapshot s;
  s.schema_version = version;
  const auto section = [&](const char* name) -> const json& {
    static const json empty = json::array();
    if (!doc.contains(name)) return empty;
    if (!doc[name].is_array()) throw ParseError(fmt::format("'{}' must be an array", name), 0, name);
    return doc[name];
  };
  const auto& users = section("users");
  for (std::size_t i = 0; i < users.size(); ++i) {
    s.users.push_back(user_from_json(users[i], i, fmt::format("users[{}]", i)));
  }
  const auto& dishes = section("dishes");
  for (std::size_t i = 0; i < dishes.size(); ++i) {
    s.dishes.push_back(dish_from_json(dishes[i], i, fmt::format("dishes[{}]", i), /*require_id=*/true));
  }
  return s;
}

KnowledgeStore::KnowledgeStore(const GraphSnapshot& s) {
  std::set<std::uint64_t> user_ids;
  std::set<std::uint64_t> dish_ids;
  for (std::size_t i = 0; i < s.users.size(); ++i) {
    const auto& u = s.users[i];
    const auto field = fmt::format("users[{}]", i);
    if (auto v = validate_profile(u); !v.empty()) {
      throw ParseError(fmt::format("{}: {}", field, InvalidProfileError(v).what()), i, field);
    }
    if (!users_.emplace(canonical_token(u.name), u).second) {
      throw ParseError(fmt::format("{}: duplicate user '{}'", field, u.name), i, field + ".name");
    }
    if (!user_ids.insert(u.id.value).second || u.id.value == 0) {
      throw ParseError(fmt::format("{}: duplicate or zero id", field), i, field + ".id");
    }
    next_user_id_ = std::max(next_user_id_, u.id.value + 1);
  }
  for (std::size_t i = 0; i < s.dishes.size(); ++i) {
    const auto& d = s.dishes[i];
    const auto field = fmt::format("dishes[{}]", i);
    if (auto v = validate_dish(d); !v.empty()) {
      throw ParseError(fmt::format("{}: {}", field, InvalidDishError(v).what()), i, field);
    }
    if (!dishes_.emplace(canonical_token(d.name), d).second) {
      throw ParseError(fmt::format("{}: duplicate dish '{}'", field, d.name), i, field + ".name");
    }
    if (!dish_ids.insert(d.id.value).second || d.id.value == 0) {
      throw ParseError(fmt::format("{}: duplicate or zero id", field), i, field + ".id");
    }
    next_dish_id_ = std::max(next_dish_id_, d.id.value + 1);
  }
}

UserId KnowledgeStore::insert_user(const UserProfile& p) {
  if (auto v = validate_profile(p); !v.empty()) throw InvalidProfileError(std::move(v));
  auto key = canonical_token(p.name);
  std::unique_lock lock(mu_);
  if (users_.contains(key)) throw DuplicateUserError(fmt::format("user '{}' already exists", key));
  UserProfile stored = p;
  stored.id = UserId{next_user_id_++};
  users_.emplace(std::move(key), stored);
  return stored.id;
}

DishId KnowledgeStore::insert_dish(const Dish& d) {
  if (auto v = validate_dish(d); !v.empty()) throw InvalidDishError(std::move(v));
  auto key = canonical_token(d.name);
  std::unique_lock lock(mu_);
  if (dishes_.contains(key)) throw DuplicateDishError(fmt::format("dish '{}' already exists", key));
  Dish stored = d;
  stored.id = DishId{next_dish_id_++};
  dishes_.emplace(std::move(key), stored);
  return stored.id;
}

Dish KnowledgeStore::get_dish(std::string_view name) const {
  const auto key = canonical_token(name);
  std::shared_lock lock(mu_);
  const auto it = dishes_.find(key);
  if (it == dishes_.end()) throw NotFoundError(fmt::format("no dish named '{}'", key));
  return it->second;
}

UserProfile KnowledgeStore::get_user(std::string_view name) const {
  const auto key = canonical_token(name);
  std::shared_lock lock(mu_);
  const auto it = users_.find(key);
  if (it == users_.end()) throw NotFoundError(fmt::format("no user named '{}'", key));
  return it->second;
}

bool KnowledgeStore::has_user(std::string_view name) const {
  const auto key = canonical_token(name);
  std::shared_lock lock(mu_);
  return users_.contains(key);
}

bool KnowledgeStore::has_dish(std::string_view name) const {
  const auto key = canonical_token(name);
  std::shared_lock lock(mu_);
  return dishes_.contains(key);
}

std::vector<Dish> KnowledgeStore::dishes_safe_for(const UserProfile& user) const {
  std::vector<Dish> out;
  std::shared_lock lock(mu_);
  for (const auto& [_, d] : dishes_) {
    const bool clash = std::any_of(d.allergens.begin(), d.allergens.end(),
                                   [&](const Allergen& a) { return user.allergies.contains(a); });
    if (!clash) out.push_back(d);
  }
  return out;
}

std::vector<Dish> KnowledgeStore::all_dishes() const {
  std::vector<Dish> out;
  std::shared_lock lock(mu_);
  out.reserve(dishes_.size());
  for (const auto& [_, d] : dishes_) out.push_back(d);
  return out;
}

std::size_t KnowledgeStore::user_count() const {
  std::shared_lock lock(mu_);
  return users_.size();
}

std::size_t KnowledgeStore::dish_count() const {
  std::shared_lock lock(mu_);
  return dishes_.size();
}

GraphSnapshot KnowledgeStore::snapshot_locked() const {
  GraphSnapshot s;
  for (const auto& [_, u] : users_) s.users.push_back(u);
  for (const auto& [_, d] : dishes_) s.dishes.push_back(d);
  return s;
}

GraphSnapshot KnowledgeStore::snapshot() const {
  std::shared_lock lock(mu_);
  return snapshot_locked();
}

std::uint64_t KnowledgeStore::fingerprint() const {
  const auto text = serialize_snapshot(snapshot());
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void KnowledgeStore::save_snapshot(const std::filesystem::path& path) const {
  const auto text = serialize_snapshot(snapshot());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << text;
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

GraphSnapshot KnowledgeStore::load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_snapshot(buf.str());
}

namespace {

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

void ingest_one(const json& rec, std::size_t location, bool is_line, KnowledgeStore& store,
                IngestReport& report) {
  const auto where = is_line ? fmt::format("line {}", location) : fmt::format("record {}", location);
  try {
    store.insert_dish(dish_from_json(rec, location, where, /*require_id=*/false));
    ++report.loaded;
  } catch (const ParseError& e) {
    report.issues.push_back({location, is_line, e.what()});
  } catch (const Error& e) {
    report.issues.push_back({location, is_line, fmt::format("{}: {}", where, e.what())});
  }
}

}  // namespace

IngestReport ingest_dishes(std::string_view text, KnowledgeStore& store) {
  IngestReport report;
  json whole = json::parse(text, nullptr, /*allow_exceptions=*/false);
  const bool single_document =
      !whole.is_discarded() && (whole.is_array() || (whole.is_object() && whole.contains("dishes")));
  if (single_document) {
    const json& records = whole.is_array() ? whole : whole["dishes"];
    if (!records.is_array()) {
      report.issues.push_back({0, false, "'dishes' must be an array"});
      return report;
    }
    for (std::size_t i = 0; i < records.size(); ++i) ingest_one(records[i], i, false, store, report);
    return report;
  }

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (blank(line)) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) {
      report.issues.push_back({line_no, true, fmt::format("line {}: not valid JSON", line_no)});
      continue;
    }
    ingest_one(rec, line_no, true, store, report);
  }
  return report;
}

}  // namespace advisor
