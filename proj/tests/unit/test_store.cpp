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

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "advisor/instances.hpp"
#include "advisor/knowledge_store.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace advisor;
using advisor::testing::shares_allergen;

namespace {

UserProfile user(std::string name, Nutrients needs, AllergenSet allergies = {}) {
  return UserProfile{UserId{}, std::move(name), needs, std::move(allergies)};
}

Dish dish(std::string name, Nutrients n, AllergenSet allergens = {}) {
  return Dish{DishId{}, std::move(name), n, std::move(allergens)};
}

// Random store from a seed: `users` users, `dishes` dishes.
void populate(KnowledgeStore& ks, std::uint64_t seed, std::size_t users, std::size_t dishes) {
  InstanceGenerator gen(seed);
  auto inst = gen.make(dishes);
  for (auto& d : inst.dishes) ks.insert_dish(d);
  for (std::size_t i = 0; i < users; ++i) {
    auto u = gen.make_user(inst.targets, 3);
    u.name = fmt::format("user-{:03}", i);
    ks.insert_user(u);
  }
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / fmt::format("advisor-{}-{}", ::getpid(), name);
}

}  // namespace

TEST_CASE("insert then get, case and whitespace insensitive") {
  KnowledgeStore ks;
  const auto id = ks.insert_user(user("Anna", Nutrients::from_values(600, 60, 40, 20), make_allergens({"lactose"})));
  CHECK(id.value > 0);
  const auto anna = ks.get_user("anna");
  CHECK(anna.id == id);
  CHECK(anna.name == "Anna");
  CHECK(ks.get_user("  ANNA ") == anna);
  CHECK_THROWS_AS(ks.get_user("bruno"), NotFoundError);

  const auto did = ks.insert_dish(dish("Pasta al pesto", Nutrients::from_values(450, 55, 12, 20), make_allergens({"gluten"})));
  CHECK(ks.get_dish("pasta al pesto").id == did);
  CHECK(ks.get_dish("Pasta Al Pesto  ").id == did);
  CHECK(ks.get_dish("  pasta   al pesto").nutrients == Nutrients::from_values(450, 55, 12, 20));
  CHECK_THROWS_AS(ks.get_dish("risotto"), NotFoundError);
  CHECK(ks.insert_dish(dish("Plain rice", Nutrients::from_values(200, 45, 4, 0))).value > did.value);
}

TEST_CASE("uniqueness and validation gates") {
  KnowledgeStore ks;
  ks.insert_user(user("Anna", Nutrients::from_values(600, 60, 40, 20)));
  CHECK_THROWS_AS(ks.insert_user(user("anna ", Nutrients::from_values(700, 60, 40, 20))), DuplicateUserError);
  CHECK_THROWS_AS(ks.insert_user(user("Bea", Nutrients::from_values(600, 60, 40, -1))), InvalidProfileError);
  ks.insert_dish(dish("Rice", Nutrients::from_values(200, 45, 4, 0)));
  CHECK_THROWS_AS(ks.insert_dish(dish("RICE", Nutrients::from_values(1, 1, 1, 1))), DuplicateDishError);
  CHECK_THROWS_AS(ks.insert_dish(dish("", Nutrients::from_values(1, 1, 1, 1))), InvalidDishError);
  CHECK(ks.user_count() == 1);
  CHECK(ks.dish_count() == 1);
}

TEST_CASE("dishes_safe_for examples") {
  KnowledgeStore ks;
  ks.insert_dish(dish("Pasta", Nutrients::from_values(450, 55, 12, 20), make_allergens({"gluten"})));
  ks.insert_dish(dish("Rice", Nutrients::from_values(200, 45, 4, 0)));
  const auto needs = Nutrients::from_values(600, 60, 40, 20);

  const auto safe = ks.dishes_safe_for(user("A", needs, make_allergens({"gluten"})));
  REQUIRE(safe.size() == 1);
  CHECK(safe[0].name == "Rice");
  CHECK(ks.dishes_safe_for(user("B", needs)).size() == 2);
  CHECK(ks.dishes_safe_for(user("C", needs, make_allergens({"gluten", "lactose"}))).size() == 1);

  KnowledgeStore all_allergenic;
  all_allergenic.insert_dish(dish("Pasta", Nutrients::from_values(450, 55, 12, 20), make_allergens({"gluten"})));
  all_allergenic.insert_dish(dish("Cheese", Nutrients::from_values(300, 1, 20, 25), make_allergens({"lactose"})));
  CHECK(all_allergenic.dishes_safe_for(user("D", needs, make_allergens({"gluten", "lactose"}))).empty());
}

TEST_CASE("dishes_safe_for agrees with brute-force intersection on random stores") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    KnowledgeStore ks;
    populate(ks, seed, 0, 40);
    InstanceGenerator gen(seed * 7919);
    const auto u = gen.make_user(Nutrients::from_values(600, 60, 40, 20), 4);
    const auto safe = ks.dishes_safe_for(u);
    std::size_t expected = 0;
    for (const auto& d : ks.all_dishes()) {
      if (!shares_allergen(d.allergens, u.allergies)) ++expected;
    }
    CHECK(safe.size() == expected);
    for (const auto& d : safe) CHECK_FALSE(shares_allergen(d.allergens, u.allergies));
    CHECK(std::is_sorted(safe.begin(), safe.end(),
                         [](const Dish& a, const Dish& b) { return canonical_token(a.name) < canonical_token(b.name); }));
  }
}

TEST_CASE("reads leave the store unchanged") {
  KnowledgeStore ks;
  populate(ks, 5, 4, 12);
  const auto before = ks.fingerprint();
  (void)ks.get_user("user-001");
  (void)ks.all_dishes();
  (void)ks.dishes_safe_for(ks.get_user("user-002"));
  CHECK_THROWS(ks.get_dish("nothing"));
  CHECK(ks.fingerprint() == before);
}

TEST_CASE("snapshot round trip is byte-equal") {
  KnowledgeStore ks;
  populate(ks, 3, 3, 5);
  const auto path = temp_file("roundtrip.json");
  ks.save_snapshot(path);
  const auto first = advisor::testing::read_text(path);
  KnowledgeStore reloaded(KnowledgeStore::load_snapshot(path));
  CHECK(reloaded.snapshot() == ks.snapshot());
  CHECK(serialize_snapshot(reloaded.snapshot()) == first);
  CHECK(reloaded.fingerprint() == ks.fingerprint());
  std::filesystem::remove(path);
}

TEST_CASE("randomized stores survive serialization losslessly") {
  for (std::uint64_t seed = 10; seed < 60; ++seed) {
    KnowledgeStore ks;
    populate(ks, seed, seed % 6, 1 + seed % 30);
    const auto text = serialize_snapshot(ks.snapshot());
    const auto parsed = parse_snapshot(text);
    CHECK(parsed == ks.snapshot());
    CHECK(serialize_snapshot(parsed) == text);
    KnowledgeStore again(parsed);
    // Ids continue after the loaded maximum.
    const auto next = again.insert_dish(dish("fresh", Nutrients::from_values(1, 1, 1, 1)));
    for (const auto& d : parsed.dishes) CHECK(next.value > d.id.value);
  }
}

TEST_CASE("snapshot numbers carry one decimal place") {
  KnowledgeStore ks;
  ks.insert_dish(dish("Rice", Nutrients::from_values(200, 45, 4, 0.25)));
  const auto text = serialize_snapshot(ks.snapshot());
  CHECK(text.find("\"calories\": 200.0") != std::string::npos);
  CHECK(text.find("\"fats\": 0.3") != std::string::npos);
}

TEST_CASE("snapshot errors") {
  CHECK_THROWS_AS(parse_snapshot(R"({"schema_version": 2, "users": [], "dishes": []})"), SchemaVersionMismatchError);
  try {
    parse_snapshot(R"({"schema_version": 1, "users": [], "dishes": [
      {"id": 1, "name": "Rice", "calories": 1.0, "carbs": 1.0, "proteins": 1.0, "fats": 1.0, "allergens": []},
      {"id": 2, "name": "Soup", "calories": "lots", "carbs": 1.0, "proteins": 1.0, "fats": 1.0, "allergens": []}]})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.record() == 1);
    CHECK(e.field().find("calories") != std::string::npos);
    CHECK(std::string(e.what()).find("dishes[1]") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_snapshot("not json"), ParseError);
  CHECK_THROWS_AS(parse_snapshot(R"({"schema_version": 1, "extra": 1})"), ParseError);
  CHECK_THROWS_AS(KnowledgeStore::load_snapshot("/nonexistent/advisor.json"), IoError);
}

TEST_CASE("fixture store loads") {
  const auto ks = advisor::testing::fixture_store();
  CHECK(ks->dish_count() == 22);
  CHECK(ks->user_count() == 5);
  CHECK(ks->get_user("anna").allergies == make_allergens({"lactose"}));
}

TEST_CASE("concurrent readers and a writer see consistent state") {
  KnowledgeStore ks;
  populate(ks, 77, 3, 30);
  std::atomic<bool> stop{false};
  std::atomic<int> bad{0};
  std::vector<std::thread> readers;
  for (int r = 0; r < 4; ++r) {
    readers.emplace_back([&] {
      while (!stop) {
        const auto s = ks.snapshot();
        const auto safe = ks.dishes_safe_for(s.users.front());
        if (safe.size() > ks.dish_count()) ++bad;
        for (const auto& d : safe) {
          if (shares_allergen(d.allergens, s.users.front().allergies)) ++bad;
        }
      }
    });
  }
  for (int i = 0; i < 200; ++i) ks.insert_dish(dish(fmt::format("extra-{}", i), Nutrients::from_values(100, 10, 5, 2)));
  stop = true;
  for (auto& t : readers) t.join();
  CHECK(bad == 0);
  CHECK(ks.dish_count() == 230);
}

TEST_CASE("ingestion skips bad records and names their line") {
  KnowledgeStore ks;
  const auto report = ingest_dishes(
      "{\"name\": \"Rice\", \"calories\": 200, \"carbs\": 45, \"proteins\": 4, \"fats\": 0, \"allergens\": []}\n"
      "{\"name\": \"Broken\", \"calories\": 200\n"
      "\n"
      "{\"name\": \"Soup\", \"calories\": 180, \"carbs\": 28, \"proteins\": 7, \"fats\": 4, \"allergens\": [\"Celery\"]}\n"
      "{\"name\": \"Bad\", \"calories\": -1, \"carbs\": 1, \"proteins\": 1, \"fats\": 1, \"allergens\": []}\n",
      ks);
  CHECK(report.loaded == 2);
  REQUIRE(report.issues.size() == 2);
  CHECK(report.issues[0].is_line);
  CHECK(report.issues[0].location == 2);
  CHECK(report.issues[1].location == 5);
  CHECK(ks.get_dish("soup").allergens == make_allergens({"celery"}));

  KnowledgeStore doc;
  const auto r2 = ingest_dishes(R"({"dishes": [{"name": "A", "calories": 1, "carbs": 1, "proteins": 1, "fats": 1, "allergens": []},
                                               {"name": "A", "calories": 2, "carbs": 1, "proteins": 1, "fats": 1, "allergens": []}]})",
                                doc);
  CHECK(r2.loaded == 1);
  REQUIRE(r2.issues.size() == 1);
  CHECK_FALSE(r2.issues[0].is_line);
  CHECK(r2.issues[0].location == 1);
}
