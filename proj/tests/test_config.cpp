#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "slab/config.hpp"

using namespace slab;

namespace {

// Early potential with every forward cone clear of the torus: the main grid
// is four times wider than tall, the reduced grids widen to match, and the
// mode algebra grid stretches to nx=300 so a row-2 bump still fits. Only the
// mode-ordering precondition is violated.
RunConfig early_potential_config() {
  RunConfig c = reference_config();
  c.nx = {512};
  c.potential.t_center = 0.16;
  c.potential.t_width = 0.04;
  c.potential.x_width = 0.05;
  c.dense_nx = 64;
  c.state_nx = 64;
  c.funcalg.nx = 300;
  return c;
}

}  // namespace

TEST_CASE("reference config round trips through json", "[config]") {
  const RunConfig c = reference_config();
  const json j = to_json(c);
  const RunConfig back = config_from_json(j);
  CHECK(to_json(back).dump() == j.dump());
  CHECK(config_hash(back) == config_hash(c));
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("packaged reference config matches the built-in one", "[config]") {
  const std::string path = std::string(SLAB_SOURCE_DIR) + "/configs/reference.json";
  const RunConfig packaged = load_config(path);
  CHECK(to_json(packaged).dump() == to_json(reference_config()).dump());
}

TEST_CASE("unknown keys and wrong types are rejected", "[config]") {
  json j = to_json(reference_config());
  j["battary"] = 4;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j.erase("battary");
  j["potential"]["shape"] = "round";
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j["potential"].erase("shape");
  j["nt"] = "many";
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j["nt"] = 128;
  j["scenario"]["speed"] = 3;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::array({1, 2})), ConfigError);
}

TEST_CASE("validation rejects inconsistent top-level settings", "[config]") {
  auto broken = [](auto mutate) {
    RunConfig c = reference_config();
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.dt = 0.02; })), ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.nx = {}; })), ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.rep = "d3_real"; })), ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.topology = "bounded"; })),
                  ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.mass = -1.0; })), ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.battery = 0; })), ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.tol_override = 0.5; })),
                  ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.schema_version = "0"; })),
                  ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.zero_mode_policy = "maybe"; })),
                  ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.out_dir = ""; })), ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.funcalg.n_modes = 0; })),
                  ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.funcalg.p_max = 9; })),
                  ConfigError);
}

TEST_CASE("oracle caps bound every reduced grid", "[config]") {
  RunConfig c = reference_config();
  c.oracle_cap = 1000;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.oracle_cap = 100;
  CHECK_THROWS_AS(validate(c), ConfigError);
  RunConfig d = reference_config();
  d.dense_main = true;
  CHECK_THROWS_AS(validate(d), ConfigError);
  d.oracle_cap = 4 * d.nt * 128 * 2;
  CHECK_NOTHROW(validate(d));
}

TEST_CASE("scenario sources are bounds checked", "[config]") {
  auto broken = [](auto mutate) {
    RunConfig c = reference_config();
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.scenario.t = 0; })), ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.scenario.t = 127; })), ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.scenario.x = {600}; })),
                  ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.scenario.component = 5; })),
                  ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.scenario.source = "noise"; })),
                  ConfigError);
  CHECK_THROWS_AS(validate(broken([](RunConfig& c) { c.scenario.format = "xml"; })),
                  ConfigError);
  CHECK_NOTHROW(validate(broken([](RunConfig& c) { c.scenario.source = "zero"; })));
}

TEST_CASE("the mode family must sit strictly before the potential", "[config]") {
  const RunConfig early = early_potential_config();
  CHECK_THROWS_AS(validate(early), ConfigError);
  RunConfig late = early_potential_config();
  late.potential.t_center = 0.65625;
  late.potential.t_width = 0.0859375;
  CHECK_NOTHROW(validate(late));
}

TEST_CASE("config files round trip and bad files are named", "[config]") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  const std::string good = (dir / "slab_config_roundtrip.json").string();
  RunConfig c = reference_config();
  c.seed = 99;
  c.out_dir = "elsewhere";
  save_config(c, good);
  const RunConfig back = load_config(good);
  CHECK(to_json(back).dump() == to_json(c).dump());
  std::remove(good.c_str());

  CHECK_THROWS_AS(load_config((dir / "slab_no_such_file.json").string()), ConfigError);
  const std::string bad = (dir / "slab_config_broken.json").string();
  {
    std::ofstream f(bad);
    f << "{ this is not json";
  }
  CHECK_THROWS_AS(load_config(bad), ConfigError);
  std::remove(bad.c_str());
}

TEST_CASE("derived grids share the physical slab", "[config]") {
  const RunConfig c = reference_config();
  const SpacetimeGrid g = grid_of(c);
  const SpacetimeGrid gd = dense_grid_of(c);
  const SpacetimeGrid gf = funcalg_grid_of(c);
  CHECK(gd.nt == c.dense_nt);
  CHECK(gd.nx[0] == c.dense_nx);
  CHECK(std::abs(gd.nt * gd.dt - g.nt * g.dt) < 1e-12);
  CHECK(std::abs(gd.nx[0] * gd.dx - g.nx[0] * g.dx) < 1e-12);
  CHECK(std::abs(gf.nt * gf.dt - g.nt * g.dt) < 1e-12);
  RunConfig m = c;
  m.dense_main = true;
  m.oracle_cap = 4 * m.nt * m.nx[0] * 2;
  CHECK(dense_grid_of(m).same_shape(g));

  const auto sites = funcalg_mode_sites(c, gf);
  REQUIRE(sites.size() == 5);
  for (const auto& [t, xf] : sites) {
    CHECK(t == 2);
    CHECK(xf < gf.nspace());
  }
}
