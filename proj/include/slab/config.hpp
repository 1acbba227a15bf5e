#pragma once

// Run configuration. One JSON object drives every tool: grid and fiber
// conventions, mass, potential profile, batteries, seeds, reduced grids for
// dense cross-checks, and the mode-algebra truncation. validate() rebuilds
// every derived object once so that each module precondition (cfl bound,
// interior support, cone-in-slab, no wraparound, dense cap) fails here with
// a named diagnostic before any compute starts.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slab/clifford.hpp"
#include "slab/common.hpp"
#include "slab/gauge.hpp"
#include "slab/grid.hpp"
#include "slab/hadamard.hpp"
#include "slab/tolerances.hpp"

namespace slab {

using json = nlohmann::json;

struct PotentialConfig {
  std::string profile = "bump";    // none | bump | box
  std::vector<double> amplitude;   // dim components (A_0 .. A_{dim-1})
  double t_center = 0.0;           // bump center, physical time
  double t_width = 0.0;            // bump half-width, physical time
  std::vector<double> x_center;    // dim-1 centers, physical
  double x_width = 0.0;            // common spatial half-width, physical
  int t0 = 0, t1 = 0;              // box rows, main-grid indices
  std::vector<int> x_lo, x_hi;     // box cells, main-grid indices
};

struct AlphaConfig {
  double amplitude = 2e-4;  // gauge-function bump height for the diagnostic
  double t_center = 0.65625;
  double t_width = 0.12;
  std::vector<double> x_center = {0.5};
  double x_width = 0.12;
};

struct FuncalgConfig {
  int nt = 16;       // mode-algebra grid, same physical slab as the main grid
  int nx = 12;
  int n_modes = 10;  // far-past site-delta family size
  int p_max = 6;
  int battery = 64;  // random functionals for the algebra Moller battery
};

struct ScenarioConfig {
  std::string source = "delta";  // zero | delta | random
  int t = 32;                    // delta row
  std::vector<int> x = {64};     // delta cell
  int component = 0;             // delta fiber component
  std::string format = "both";   // csv | binary | both
};

struct RunConfig {
  std::string schema_version = kSchemaVersion;
  std::string rep = "d2_real";
  int nt = 128;
  std::vector<int> nx = {128};
  double dt = 1.0 / 128;
  double dx = 1.0 / 128;
  std::string topology = "periodic";
  double mass = 0.75;
  PotentialConfig potential;
  AlphaConfig alpha;
  int battery = 32;
  std::uint64_t seed = 20907;
  double tol_override = 0.0;  // 0 keeps the pinned composed tolerance
  long oracle_cap = kDenseCapDefault;
  int dense_nt = 24;  // reduced grid for single-leg dense oracles
  int dense_nx = 24;
  int state_nt = 20;  // reduced grid for state kernels (doubled index, pricier)
  int state_nx = 20;
  bool dense_main = false;  // oracle mode: run the dense suites on the main grid
  FuncalgConfig funcalg;
  std::string zero_mode_policy = "half-weight";
  ScenarioConfig scenario;
  std::string out_dir = "out";
};

inline RunConfig reference_config() {
  RunConfig c;
  c.potential.profile = "bump";
  c.potential.amplitude = {0.8, 0.5};
  c.potential.t_center = 0.65625;
  c.potential.t_width = 0.0859375;
  c.potential.x_center = {0.5};
  c.potential.x_width = 0.0546875;
  return c;
}

// ---------------------------------------------------------------------------
// JSON round trip. Objects reject unknown keys so that typos surface as
// config errors instead of silently falling back to defaults.

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed,
                       const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: " + where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
}

template <typename T>
inline T take(const json& j, const char* key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: key '") + key + "' has the wrong type");
  }
}

}  // namespace detail

inline json to_json(const PotentialConfig& p) {
  json j;
  j["profile"] = p.profile;
  j["amplitude"] = p.amplitude;
  if (p.profile == "bump") {
    j["t_center"] = p.t_center;
    j["t_width"] = p.t_width;
    j["x_center"] = p.x_center;
    j["x_width"] = p.x_width;
  } else if (p.profile == "box") {
    j["t0"] = p.t0;
    j["t1"] = p.t1;
    j["x_lo"] = p.x_lo;
    j["x_hi"] = p.x_hi;
  }
  return j;
}

inline json to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["rep"] = c.rep;
  j["nt"] = c.nt;
  j["nx"] = c.nx;
  j["dt"] = c.dt;
  j["dx"] = c.dx;
  j["topology"] = c.topology;
  j["mass"] = c.mass;
  j["potential"] = to_json(c.potential);
  j["alpha"] = {{"amplitude", c.alpha.amplitude},
                {"t_center", c.alpha.t_center},
                {"t_width", c.alpha.t_width},
                {"x_center", c.alpha.x_center},
                {"x_width", c.alpha.x_width}};
  j["battery"] = c.battery;
  j["seed"] = c.seed;
  j["tol_override"] = c.tol_override;
  j["oracle_cap"] = c.oracle_cap;
  j["dense_nt"] = c.dense_nt;
  j["dense_nx"] = c.dense_nx;
  j["state_nt"] = c.state_nt;
  j["state_nx"] = c.state_nx;
  j["dense_main"] = c.dense_main;
  j["funcalg"] = {{"nt", c.funcalg.nt},
                  {"nx", c.funcalg.nx},
                  {"n_modes", c.funcalg.n_modes},
                  {"p_max", c.funcalg.p_max},
                  {"battery", c.funcalg.battery}};
  j["zero_mode_policy"] = c.zero_mode_policy;
  j["scenario"] = {{"source", c.scenario.source},
                   {"t", c.scenario.t},
                   {"x", c.scenario.x},
                   {"component", c.scenario.component},
                   {"format", c.scenario.format}};
  j["out_dir"] = c.out_dir;
  return j;
}

inline RunConfig config_from_json(const json& j) {
  detail::check_keys(j, {"schema_version", "rep", "nt", "nx", "dt", "dx", "topology",
                         "mass", "potential", "alpha", "battery", "seed", "tol_override",
                         "oracle_cap", "dense_nt", "dense_nx", "state_nt", "state_nx",
                         "dense_main", "funcalg", "zero_mode_policy", "scenario", "out_dir"},
                     "the top-level config");
  RunConfig d = reference_config();
  RunConfig c;
  c.schema_version = detail::take(j, "schema_version", d.schema_version);
  c.rep = detail::take(j, "rep", d.rep);
  c.nt = detail::take(j, "nt", d.nt);
  c.nx = detail::take(j, "nx", d.nx);
  c.dt = detail::take(j, "dt", d.dt);
  c.dx = detail::take(j, "dx", d.dx);
  c.topology = detail::take(j, "topology", d.topology);
  c.mass = detail::take(j, "mass", d.mass);
  if (j.contains("potential")) {
    const json& p = j.at("potential");
    detail::check_keys(p, {"profile", "amplitude", "t_center", "t_width", "x_center",
                           "x_width", "t0", "t1", "x_lo", "x_hi"},
                       "potential");
    c.potential.profile = detail::take(p, "profile", std::string("none"));
    c.potential.amplitude = detail::take(p, "amplitude", std::vector<double>{});
    c.potential.t_center = detail::take(p, "t_center", 0.0);
    c.potential.t_width = detail::take(p, "t_width", 0.0);
    c.potential.x_center = detail::take(p, "x_center", std::vector<double>{});
    c.potential.x_width = detail::take(p, "x_width", 0.0);
    c.potential.t0 = detail::take(p, "t0", 0);
    c.potential.t1 = detail::take(p, "t1", 0);
    c.potential.x_lo = detail::take(p, "x_lo", std::vector<int>{});
    c.potential.x_hi = detail::take(p, "x_hi", std::vector<int>{});
  } else {
    c.potential = d.potential;
  }
  if (j.contains("alpha")) {
    const json& a = j.at("alpha");
    detail::check_keys(a, {"amplitude", "t_center", "t_width", "x_center", "x_width"},
                       "alpha");
    c.alpha.amplitude = detail::take(a, "amplitude", d.alpha.amplitude);
    c.alpha.t_center = detail::take(a, "t_center", d.alpha.t_center);
    c.alpha.t_width = detail::take(a, "t_width", d.alpha.t_width);
    c.alpha.x_center = detail::take(a, "x_center", d.alpha.x_center);
    c.alpha.x_width = detail::take(a, "x_width", d.alpha.x_width);
  } else {
    c.alpha = d.alpha;
  }
  c.battery = detail::take(j, "battery", d.battery);
  c.seed = detail::take(j, "seed", d.seed);
  c.tol_override = detail::take(j, "tol_override", d.tol_override);
  c.oracle_cap = detail::take(j, "oracle_cap", d.oracle_cap);
  c.dense_nt = detail::take(j, "dense_nt", d.dense_nt);
  c.dense_nx = detail::take(j, "dense_nx", d.dense_nx);
  c.state_nt = detail::take(j, "state_nt", d.state_nt);
  c.state_nx = detail::take(j, "state_nx", d.state_nx);
  c.dense_main = detail::take(j, "dense_main", d.dense_main);
  if (j.contains("funcalg")) {
    const json& f = j.at("funcalg");
    detail::check_keys(f, {"nt", "nx", "n_modes", "p_max", "battery"}, "funcalg");
    c.funcalg.nt = detail::take(f, "nt", d.funcalg.nt);
    c.funcalg.nx = detail::take(f, "nx", d.funcalg.nx);
    c.funcalg.n_modes = detail::take(f, "n_modes", d.funcalg.n_modes);
    c.funcalg.p_max = detail::take(f, "p_max", d.funcalg.p_max);
    c.funcalg.battery = detail::take(f, "battery", d.funcalg.battery);
  } else {
    c.funcalg = d.funcalg;
  }
  c.zero_mode_policy = detail::take(j, "zero_mode_policy", d.zero_mode_policy);
  if (j.contains("scenario")) {
    const json& s = j.at("scenario");
    detail::check_keys(s, {"source", "t", "x", "component", "format"}, "scenario");
    c.scenario.source = detail::take(s, "source", d.scenario.source);
    c.scenario.t = detail::take(s, "t", d.scenario.t);
    c.scenario.x = detail::take(s, "x", d.scenario.x);
    c.scenario.component = detail::take(s, "component", d.scenario.component);
    c.scenario.format = detail::take(s, "format", d.scenario.format);
  } else {
    c.scenario = d.scenario;
  }
  c.out_dir = detail::take(j, "out_dir", d.out_dir);
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

inline void save_config(const RunConfig& c, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("config: cannot write " + path);
  f << to_json(c).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Materializers. All derived objects are rebuilt from the config on demand;
// the reduced grids keep the same physical slab so physically specified
// profiles transfer unchanged.

inline CliffordRep rep_of(const RunConfig& c) {
  if (c.rep == "d2_real") return build_rep(2, Signature::mostly_minus);
  if (c.rep == "d4_dirac") return build_rep(4, Signature::mostly_minus);
  if (c.rep == "d2_mostly_plus") return build_rep(2, Signature::mostly_plus);
  throw ConfigError("config: unknown rep convention '" + c.rep + "'");
}

inline SpacetimeGrid grid_of(const RunConfig& c) {
  return SpacetimeGrid(rep_of(c).dim, c.nt, c.nx, c.dt, c.dx, Topology::periodic);
}

inline SpacetimeGrid reduced_grid(const RunConfig& c, int nt_r, int nx_r) {
  const int dim = rep_of(c).dim;
  const double span_t = c.nt * c.dt;
  const double span_x = (c.nx.empty() ? 2 : c.nx[0]) * c.dx;
  std::vector<int> nx_v(std::size_t(dim - 1), nx_r);
  return SpacetimeGrid(dim, nt_r, nx_v, span_t / nt_r, span_x / nx_r,
                       Topology::periodic);
}

inline SpacetimeGrid dense_grid_of(const RunConfig& c) {
  if (c.dense_main) return grid_of(c);
  return reduced_grid(c, c.dense_nt, c.dense_nx);
}

inline SpacetimeGrid state_grid_of(const RunConfig& c) {
  return reduced_grid(c, c.state_nt, c.state_nx);
}

inline SpacetimeGrid funcalg_grid_of(const RunConfig& c) {
  return reduced_grid(c, c.funcalg.nt, c.funcalg.nx);
}

// Deterministic far-past delta sites for the mode algebra: row-major cells
// starting at row 2, enough sites to cover n_modes fiber components.
inline std::vector<std::pair<int, long>> funcalg_mode_sites(const RunConfig& c,
                                                            const SpacetimeGrid& gf) {
  const int nsites = (c.funcalg.n_modes + gf.fiber - 1) / gf.fiber;
  std::vector<std::pair<int, long>> sites;
  for (int j = 0; j < nsites; ++j)
    sites.push_back({2 + int(j / gf.nspace()), long(j) % gf.nspace()});
  return sites;
}

// Builds the configured potential on an arbitrary grid over the same slab.
// Box indices are main-grid indices and rescale by the extent ratio.
inline GaugePotential potential_of(const RunConfig& c, const SpacetimeGrid& g,
                                   ConeCheck check = ConeCheck::enforce) {
  const PotentialConfig& p = c.potential;
  if (p.profile == "none")
    return GaugePotential(g, std::vector<double>(std::size_t(g.nsites() * g.dim), 0.0),
                          check);
  if (p.profile == "bump")
    return bump_potential(g, p.amplitude, p.t_center, p.x_center, p.t_width, p.x_width,
                          check);
  if (p.profile == "box") {
    auto scale = [](int idx, int from, int to) {
      return int(std::lround(double(idx) * double(to) / double(from)));
    };
    std::vector<int> lo(p.x_lo), hi(p.x_hi);
    for (std::size_t i = 0; i < lo.size(); ++i) {
      const int nmain = c.nx[i < std::size_t(int(c.nx.size())) ? i : 0];
      lo[i] = scale(lo[i], nmain, g.nx[i]);
      hi[i] = scale(hi[i], nmain, g.nx[i]);
    }
    return box_potential(g, p.amplitude, scale(p.t0, c.nt, g.nt), scale(p.t1, c.nt, g.nt),
                         lo, hi, check);
  }
  throw ConfigError("config: unknown potential profile '" + p.profile + "'");
}

inline GaugeFunction alpha_of(const RunConfig& c, const SpacetimeGrid& g) {
  return bump_gauge_function(g, c.alpha.amplitude, c.alpha.t_center, c.alpha.x_center,
                             c.alpha.t_width, c.alpha.x_width);
}

inline ZeroModePolicy policy_of(const RunConfig& c) {
  if (c.zero_mode_policy == "half-weight") return ZeroModePolicy::half_weight;
  if (c.zero_mode_policy == "exclude-zero") return ZeroModePolicy::exclude_zero;
  if (c.zero_mode_policy == "reject") return ZeroModePolicy::reject;
  throw ConfigError("config: unknown zero-mode policy '" + c.zero_mode_policy + "'");
}

inline double composed_tol(const RunConfig& c) {
  return c.tol_override > 0.0 ? c.tol_override : tol::composed;
}

inline std::string config_hash(const RunConfig& c) {
  return hex_u64(fnv1a64(to_json(c).dump()));
}

// ---------------------------------------------------------------------------
// Whole-config validation. Throws ConfigError naming the violated
// precondition; grid and gauge constructors contribute their own named
// diagnostics (cfl bound, interior support, cone-in-slab, wraparound).

inline void validate(const RunConfig& c) {
  if (c.schema_version != kSchemaVersion)
    throw ConfigError("config: unsupported schema_version '" + c.schema_version + "'");
  const CliffordRep rep = rep_of(c);
  if (c.topology != "periodic")
    throw ConfigError("config: topology must be 'periodic' (spatial sections are tori)");
  if (int(c.nx.size()) != rep.dim - 1)
    throw ConfigError("config: nx needs dim-1 spatial extents");
  if (!std::isfinite(c.mass) || c.mass < 0.0)
    throw ConfigError("config: mass must be a finite nonnegative number");
  if (c.battery < 1 || c.battery > 4096)
    throw ConfigError("config: battery size must lie in [1, 4096]");
  if (!std::isfinite(c.tol_override) || c.tol_override < 0.0 || c.tol_override > 1e-2)
    throw ConfigError("config: tolerance override must lie in [0, 1e-2]");
  if (c.oracle_cap < 128)
    throw ConfigError("config: oracle cap too small for any dense check");
  if (c.funcalg.n_modes < 1 || c.funcalg.n_modes > 32)
    throw ConfigError("config: funcalg mode count must lie in [1, 32]");
  if (c.funcalg.p_max < 1 || c.funcalg.p_max > 8)
    throw ConfigError("config: funcalg truncation order must lie in [1, 8]");
  if (c.funcalg.battery < 1 || c.funcalg.battery > 4096)
    throw ConfigError("config: funcalg battery size must lie in [1, 4096]");
  policy_of(c);

  const SpacetimeGrid g = grid_of(c);  // validates cfl and extents
  const SpacetimeGrid gd = dense_grid_of(c);
  const SpacetimeGrid gs = state_grid_of(c);
  const SpacetimeGrid gf = funcalg_grid_of(c);
  if (2 * gd.nvals() > c.oracle_cap)
    throw ConfigError("config: dense oracle grid exceeds the oracle cap");
  if (2 * gs.nvals() > c.oracle_cap)
    throw ConfigError("config: state kernel grid exceeds the oracle cap");
  if (2 * gf.nvals() > c.oracle_cap)
    throw ConfigError("config: funcalg grid exceeds the oracle cap");

  const PotentialConfig& p = c.potential;
  if (p.profile != "none" && p.profile != "bump" && p.profile != "box")
    throw ConfigError("config: unknown potential profile '" + p.profile + "'");
  if (p.profile != "none" && int(p.amplitude.size()) != rep.dim)
    throw ConfigError("config: potential amplitude needs dim components");
  if (p.profile == "bump" && int(p.x_center.size()) != rep.dim - 1)
    throw ConfigError("config: potential x_center needs dim-1 components");
  // Cone, interior, and wraparound preconditions on every grid the suites use.
  potential_of(c, g);
  potential_of(c, gd);
  potential_of(c, gs);
  const GaugePotential pf = potential_of(c, gf);
  // The mode family must sit strictly before the potential so the mode span
  // is closed under the Moller maps (checked again numerically at build).
  const auto sites = funcalg_mode_sites(c, gf);
  int last_mode_row = 0;
  for (const auto& [t, xf] : sites) last_mode_row = std::max(last_mode_row, t);
  if (last_mode_row > gf.nt - 2)
    throw ConfigError("config: funcalg mode family leaves the slab interior");
  if (!pf.is_zero() && pf.supp.time_extent().first <= last_mode_row)
    throw ConfigError("config: funcalg modes are not strictly before the potential");
  if (int(c.alpha.x_center.size()) != rep.dim - 1)
    throw ConfigError("config: alpha x_center needs dim-1 components");
  if (!(c.alpha.t_width > 0.0) || !(c.alpha.x_width > 0.0))
    throw ConfigError("config: alpha widths must be positive");
  gauge_transform(potential_of(c, g, ConeCheck::allow_wraparound), alpha_of(c, g));

  const ScenarioConfig& s = c.scenario;
  if (s.source != "zero" && s.source != "delta" && s.source != "random")
    throw ConfigError("config: unknown scenario source '" + s.source + "'");
  if (s.format != "csv" && s.format != "binary" && s.format != "both")
    throw ConfigError("config: unknown scenario format '" + s.format + "'");
  if (s.source == "delta") {
    if (s.t < 1 || s.t > c.nt - 2)
      throw ConfigError("config: scenario delta row must lie strictly inside the slab");
    if (int(s.x.size()) != rep.dim - 1)
      throw ConfigError("config: scenario delta cell needs dim-1 coordinates");
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (s.x[i] < 0 || s.x[i] >= c.nx[i])
        throw ConfigError("config: scenario delta cell outside the spatial extents");
    if (s.component < 0 || s.component >= g.fiber)
      throw ConfigError("config: scenario delta component outside the fiber");
  }
  if (c.out_dir.empty()) throw ConfigError("config: out_dir must not be empty");
}

}  // namespace slab
