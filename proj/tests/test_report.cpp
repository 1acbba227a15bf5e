#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "slab/report.hpp"
#include "slab/verify.hpp"

using namespace slab;

namespace {

// Reference settings shrunk to a 16x16 slab so the whole suite runs in
// seconds. The scenario source moves inland to stay inside the shorter slab.
RunConfig small_config() {
  RunConfig c = reference_config();
  c.nt = 16;
  c.nx = {16};
  c.dt = 1.0 / 16;
  c.dx = 1.0 / 16;
  c.battery = 4;
  c.funcalg.battery = 6;
  c.scenario.t = 8;
  c.scenario.x = {8};
  return c;
}

}  // namespace

TEST_CASE("the verify suite is deterministic across reruns", "[report]") {
  const RunConfig cfg = small_config();
  REQUIRE_NOTHROW(validate(cfg));
  SuiteResult first = run_full_suite(cfg);
  SuiteResult second = run_full_suite(cfg);
  const Report ra{"verify", cfg, std::move(first.items), std::move(first.extras)};
  const Report rb{"verify", cfg, std::move(second.items), std::move(second.extras)};
  CHECK(report_payload(ra).dump() == report_payload(rb).dump());
  CHECK(payload_hash(ra) == payload_hash(rb));
  INFO(report_payload(ra).dump(2));
  CHECK(ra.all_pass());
}

TEST_CASE("the payload excludes the timestamp and pins the hash", "[report]") {
  Report r;
  r.kind = "verify";
  r.config = small_config();
  VerifyItem it;
  it.id = "demo.check";
  it.battery = 3;
  it.seed = 7;
  it.max_residual = 1e-13;
  it.tolerance = 1e-10;
  it.pass = true;
  r.items.push_back(it);
  r.extras["answer"] = 42;

  const json payload = report_payload(r);
  CHECK(!payload.contains("timestamp_unix_ms"));
  CHECK(!payload.contains("payload_hash"));
  CHECK(payload.at("config_hash").get<std::string>() == config_hash(r.config));
  CHECK(payload.at("kind") == "verify");
  CHECK(payload.at("seed") == r.config.seed);
  CHECK(payload.at("pass") == true);
  CHECK(payload.at("extras").at("answer") == 42);
  CHECK(payload.contains("conventions"));
  CHECK(payload.at("items").at(0).at("id") == "demo.check");

  json full = report_json(r);
  CHECK(full.contains("timestamp_unix_ms"));
  CHECK(full.at("payload_hash").get<std::string>() == payload_hash(r));
  full.erase("timestamp_unix_ms");
  full.erase("payload_hash");
  CHECK(full.dump() == payload.dump());
}

TEST_CASE("item serialization writes the note only when set", "[report]") {
  VerifyItem it;
  it.id = "quiet";
  it.pass = true;
  CHECK(!to_json(it).contains("note"));
  it.note = "spectrum near the rcond floor";
  it.blocking = false;
  const json j = to_json(it);
  CHECK(j.at("note") == "spectrum near the rcond floor");
  CHECK(j.at("blocking") == false);
}

TEST_CASE("only blocking failures fail a report", "[report]") {
  Report r;
  r.kind = "verify";
  r.config = small_config();
  VerifyItem ok;
  ok.id = "core";
  ok.pass = true;
  VerifyItem advisory;
  advisory.id = "diagnostic";
  advisory.pass = false;
  advisory.blocking = false;
  r.items = {ok, advisory};
  CHECK(r.all_pass());
  CHECK(report_payload(r).at("pass") == true);
  VerifyItem fatal;
  fatal.id = "core.broken";
  fatal.pass = false;
  r.items.push_back(fatal);
  CHECK(!r.all_pass());
  CHECK(report_payload(r).at("pass") == false);
}

TEST_CASE("written reports parse back with a matching hash", "[report]") {
  namespace fs = std::filesystem;
  Report r;
  r.kind = "state";
  r.config = small_config();
  VerifyItem it;
  it.id = "state.sample";
  it.pass = true;
  r.items.push_back(it);

  const std::string path = (fs::temp_directory_path() / "slab_report_test.json").string();
  write_report(r, path);
  json parsed;
  {
    std::ifstream f(path);
    REQUIRE(f.good());
    f >> parsed;
  }
  std::remove(path.c_str());
  CHECK(parsed.at("payload_hash").get<std::string>() == payload_hash(r));
  CHECK(parsed.at("kind") == "state");
  CHECK(parsed.at("pass") == true);

  CHECK_THROWS_AS(write_report(r, "/nonexistent_dir_zz/report.json"), ConfigError);
}
