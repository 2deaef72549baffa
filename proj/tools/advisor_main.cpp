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

// advisor: chat | ingest | bench | verify | serve

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "advisor/bench.hpp"
#include "advisor/errors.hpp"
#include "advisor/http_api.hpp"
#include "advisor/knowledge_store.hpp"
#include "advisor/service.hpp"
#include "httplib.h"

namespace {

using namespace advisor;

httplib::Server* g_server = nullptr;

void stop_server(int) {
  if (g_server != nullptr) g_server->stop();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

EngineConfig engine_config(const std::string& store, const std::string& backend) {
  auto cfg = EngineConfig::from_env();
  if (!store.empty()) cfg.store_path = store;
  if (!backend.empty()) cfg.backend = backend == "deterministic" ? "rules" : backend;
  cfg.validate();
  return cfg;
}

int run_chat(const std::string& store, const std::string& backend, bool quiet_notes, bool show_timings,
             const std::string& save) {
  auto cfg = engine_config(store, backend);
  if (quiet_notes) cfg.session.transparency = false;
  AdvisorService service(cfg);
  const auto id = service.create_session();
  fmt::print("advisor ({} users, {} dishes, backend {}). Type 'quit' to leave.\n", service.store().user_count(),
             service.store().dish_count(), service.backend_identity());
  std::string line;
  while (true) {
    fmt::print("> ");
    std::fflush(stdout);
    if (!std::getline(std::cin, line)) break;
    if (line == "quit" || line == "exit") break;
    if (canonical_token(line).empty()) continue;
    try {
      const auto r = service.post_message(id, line);
      for (const auto& n : r.disclosed_notes) fmt::print("  [{}] {}\n", note_stage_name(n.stage), n.text);
      fmt::print("{}\n", r.reply);
      if (show_timings) {
        for (const auto& t : r.timings) fmt::print("  {:<18} {:.6f} s\n", timing_stage_name(t.stage), t.seconds);
      }
    } catch (const Error& e) {
      fmt::print(stderr, "error: {}\n", e.what());
    }
  }
  if (!save.empty()) service.store().save_snapshot(save);
  return 0;
}

int run_ingest(const std::string& file, const std::string& store, const std::string& out) {
  std::unique_ptr<KnowledgeStore> ks;
  if (!store.empty() && std::filesystem::exists(store)) {
    ks = std::make_unique<KnowledgeStore>(KnowledgeStore::load_snapshot(store));
  } else {
    ks = std::make_unique<KnowledgeStore>();
  }
  const auto report = ingest_dishes(read_file(file), *ks);
  for (const auto& issue : report.issues) {
    fmt::print(stderr, "{}: {}\n", file, issue.message);
  }
  fmt::print(stderr, "loaded {} dish(es), {} rejected\n", report.loaded, report.issues.size());
  const auto target = out.empty() ? store : out;
  if (!target.empty()) {
    ks->save_snapshot(target);
    fmt::print(stderr, "wrote {}\n", target);
  }
  return report.issues.empty() ? 0 : 1;
}

int run_bench_cmd(BenchSpec spec, const std::string& out) {
  const auto rows = run_bench(spec);
  const auto csv = bench_csv(rows);
  if (out.empty()) {
    fmt::print("{}", csv);
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw IoError(fmt::format("cannot write '{}'", out));
    f << csv;
  }
  const auto& ref = reference_seconds();
  fmt::print(stderr, "{:>6} {:>14} {:>16}\n", "N", "median_s", "reference_s");
  for (const auto& [n, m] : median_elapsed(rows)) {
    const auto it = ref.find(n);
    fmt::print(stderr, "{:>6} {:>14.6f} {:>16}\n", n, m, it == ref.end() ? std::string("-") : fmt::format("{:.2f}", it->second));
  }
  return 0;
}

int run_verify(std::uint64_t first, std::uint64_t count, std::size_t max_n) {
  if (max_n < 3 || max_n > kOracleMaxDishes) {
    fmt::print(stderr, "--max-n must be between 3 and {}\n", kOracleMaxDishes);
    return 2;
  }
  std::uint64_t failures = 0;
  for (std::uint64_t s = first; s < first + count; ++s) {
    const auto c = verify_seed(s, max_n);
    if (!c.agree) {
      ++failures;
      fmt::print(stderr, "MISMATCH seed={} N={} K={}: {}\n", c.seed, c.n, c.k, c.detail);
    }
  }
  fmt::print("verified {} seed(s), {} mismatch(es)\n", count, failures);
  return failures == 0 ? 0 : 1;
}

int run_serve(const std::string& store, const std::string& backend, const std::string& host, int port) {
  AdvisorService service(engine_config(store, backend));
  HttpApi api(service);
  httplib::Server server;
  api.mount(server);
  g_server = &server;
  std::signal(SIGINT, stop_server);
  std::signal(SIGTERM, stop_server);
  fmt::print(stderr, "listening on http://{}:{}\n", host, port);
  if (!server.listen(host, port)) {
    fmt::print(stderr, "cannot listen on {}:{}\n", host, port);
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dietary advisor engine"};
  app.require_subcommand(1);

  std::string store;
  std::string backend;

  auto* chat = app.add_subcommand("chat", "Interactive dialogue on stdin/stdout");
  bool quiet_notes = false;
  bool show_timings = false;
  std::string save;
  chat->add_option("--store", store, "Snapshot to load");
  chat->add_option("--backend", backend, "rules (or deterministic) or remote");
  chat->add_flag("--no-notes", quiet_notes, "Do not disclose inner speech");
  chat->add_flag("--timings", show_timings, "Print per-stage timings");
  chat->add_option("--save", save, "Write the store here on exit");

  auto* ingest = app.add_subcommand("ingest", "Load dishes (JSON document or JSON lines) into a snapshot");
  std::string dish_file;
  std::string out;
  ingest->add_option("file", dish_file, "Dish file")->required();
  ingest->add_option("--store", store, "Snapshot to extend (created if missing)");
  ingest->add_option("--out", out, "Where to write the snapshot (default: --store)");

  auto* bench = app.add_subcommand("bench", "Solver scaling benchmark as CSV");
  BenchSpec spec;
  std::string bench_out;
  bench->add_option("--sizes", spec.sizes, "Dish counts")->delimiter(',');
  bench->add_option("--k", spec.max_dishes, "Max dishes per meal")->check(CLI::Range(1, 10));
  bench->add_option("--reps", spec.repetitions, "Repetitions per size")->check(CLI::Range(1, 1000));
  bench->add_option("--seed", spec.seed, "Base seed");
  bench->add_option("--out", bench_out, "CSV file (default stdout)");

  auto* verify = app.add_subcommand("verify", "Compare the solver with exhaustive search on seeded instances");
  std::uint64_t first = 1;
  std::uint64_t count = 200;
  std::size_t max_n = 25;
  verify->add_option("--first-seed", first, "Seed of the first instance");
  verify->add_option("--seeds", count, "Number of seeds");
  verify->add_option("--max-n", max_n, "Largest instance");

  auto* serve = app.add_subcommand("serve", "HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--store", store, "Snapshot to load");
  serve->add_option("--backend", backend, "rules (or deterministic) or remote");
  serve->add_option("--host", host, "Address to bind");
  serve->add_option("--port", port)->check(CLI::Range(1, 65535));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*chat) return run_chat(store, backend, quiet_notes, show_timings, save);
    if (*ingest) return run_ingest(dish_file, store, out);
    if (*bench) return run_bench_cmd(spec, bench_out);
    if (*verify) return run_verify(first, count, max_n);
    if (*serve) return run_serve(store, backend, host, port);
  } catch (const advisor::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 0;
}
