// Acceptance gate for the slab library. Each criterion prints exactly one
// PASS/FAIL line; the process exits nonzero if any criterion fails. The
// tolerances and time budgets are pinned here as literals on purpose, so a
// drift in the library's own thresholds cannot silently relax this gate.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "slab/cli.hpp"

using namespace slab;

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// Matches an item id against a pattern: patterns ending in '.' or '_' are
// prefixes, anything else must match exactly.
bool matches(const std::string& id, const std::string& pat) {
  if (!pat.empty() && (pat.back() == '.' || pat.back() == '_'))
    return id.size() > pat.size() && id.compare(0, pat.size(), pat) == 0;
  return id == pat;
}

struct Gate {
  const std::vector<VerifyItem>* items;
  bool ok = true;
  std::string why;

  explicit Gate(const std::vector<VerifyItem>& its) : items(&its) {}

  void fail(const std::string& reason) {
    if (ok) why = reason;
    ok = false;
  }

  void require(const std::string& pat, double tol) {
    int hits = 0;
    for (const VerifyItem& it : *items) {
      if (!matches(it.id, pat)) continue;
      ++hits;
      if (!it.pass) fail(it.id + " reported fail");
      if (it.max_residual > tol) {
        std::ostringstream os;
        os << it.id << " residual " << it.max_residual << " > " << tol;
        fail(os.str());
      }
    }
    if (hits == 0) fail("no item matches '" + pat + "'");
  }

  void require_exact(const std::string& pat) {
    int hits = 0;
    for (const VerifyItem& it : *items) {
      if (!matches(it.id, pat)) continue;
      ++hits;
      if (!it.pass || it.max_residual != 0.0) fail(it.id + " is not exactly zero");
    }
    if (hits == 0) fail("no item matches '" + pat + "'");
  }
};

int g_failures = 0;

void report(int id, const Gate& gate, double secs, double budget) {
  bool ok = gate.ok;
  std::string why = gate.why;
  if (ok && secs > budget) {
    ok = false;
    std::ostringstream os;
    os << "over time budget (" << secs << "s > " << budget << "s)";
    why = os.str();
  }
  if (!ok) ++g_failures;
  std::printf("CRITERION %d: %s (%.1fs)%s%s\n", id, ok ? "PASS" : "FAIL", secs,
              why.empty() ? "" : ": ", why.c_str());
  std::fflush(stdout);
}

void report_raw(int id, bool ok, double secs, double budget, std::string why) {
  static const std::vector<VerifyItem> none;
  Gate g(none);
  g.ok = ok;
  g.why = std::move(why);
  report(id, g, secs, budget);
}

}  // namespace

int main() {
  const RunConfig cfg = reference_config();
  validate(cfg);

  {  // 1: generator relations and metric hermiticity, all representations.
    Stopwatch sw;
    const auto items = clifford_suite();
    Gate g(items);
    g.require("clifford.", 1e-14);
    report(1, g, sw.seconds(), 1.0);
  }

  {  // 2: Green identities, exact retardation masks, characteristic speeds.
    Stopwatch sw;
    const auto items = green_suite(cfg);
    Gate g(items);
    g.require("green.identities_", 1e-10);
    g.require_exact("green.retardation_");
    g.require("green.characteristics", 1e-10);
    report(2, g, sw.seconds(), 30.0);
  }

  {  // 3: Moller intertwining, retarded supports, inverses, gauge covariance.
    Stopwatch sw;
    const auto items = moller_suite(cfg);
    Gate g(items);
    g.require("moller.intertwining", 1e-10);
    g.require_exact("moller.retardation");
    g.require("moller.inverse", 1e-10);
    g.require("moller.interaction", 1e-10);
    g.require("moller.adjoint", 1e-10);
    g.require("moller.gauge_diagnostic", 1e-6);
    report(3, g, sw.seconds(), 60.0);
  }

  {  // 4: the two propagation identities, operator route and dense oracle.
    Stopwatch sw;
    const auto items = propagator_suite(cfg);
    Gate g(items);
    g.require("moller.prop31", 1e-10);
    g.require("moller.cor32", 1e-10);
    g.require("moller.prop31_dense", 1e-11);
    g.require("moller.cor32_dense", 1e-11);
    g.require("moller.adjoint_dense", 1e-12);
    report(4, g, sw.seconds(), 120.0);
  }

  {  // 5: state bisolution and anticommutator laws, free and pulled back,
     // plus exact degeneracy of the pullback at vanishing potential.
    Stopwatch sw;
    RunConfig c5 = cfg;
    c5.state_nt = 24;
    c5.state_nx = 24;
    validate(c5);
    const SuiteResult res = state_suite(c5);
    Gate g(res.items);
    g.require("state.projector", 1e-8);
    g.require("state.bisolution_free", 1e-8);
    g.require("state.bisolution_pullback", 1e-8);
    g.require("state.anticommutator_free", 1e-8);
    g.require("state.anticommutator_pullback", 1e-8);
    g.require("state.degeneracy", 1e-12);
    report(5, g, sw.seconds(), 120.0);
  }

  FuncalgContext fc = build_funcalg_context(cfg);

  {  // 6: the graded algebra laws on the ten-mode family.
    Stopwatch sw;
    const auto items = funcalg_core_suite(cfg, fc);
    Gate g(items);
    g.require_exact("funcalg.alternation");
    g.require("funcalg.wedge", 1e-12);
    g.require("funcalg.leibniz", 1e-12);
    g.require("funcalg.jacobi", 1e-12);
    g.require("funcalg.car", 1e-12);
    g.require("funcalg.star_assoc", 1e-12);
    g.require("funcalg.involution", 1e-12);
    report(6, g, sw.seconds(), 30.0);
  }

  {  // 7: the algebra-level Moller map over the full 64-case battery.
    Stopwatch sw;
    RunConfig c7 = cfg;
    c7.funcalg.battery = 64;
    const auto items = funcalg_moller_suite(c7, fc);
    Gate g(items);
    g.require("funcalg.moller_homomorphism", 1e-10);
    g.require("funcalg.moller_bijection", 1e-10);
    g.require("funcalg.moller_star_compat", 1e-10);
    report(7, g, sw.seconds(), 120.0);
  }

  {  // 8: byte-identical verify payloads across two full runs.
    Stopwatch sw;
    namespace fs = std::filesystem;
    RunConfig c8 = reference_config();
    c8.nt = 16;
    c8.nx = {16};
    c8.dt = 1.0 / 16;
    c8.dx = 1.0 / 16;
    c8.battery = 4;
    c8.funcalg.battery = 6;
    c8.scenario.t = 8;
    c8.scenario.x = {8};
    validate(c8);

    bool ok = true;
    std::string why;
    json payloads[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path dir =
          fs::temp_directory_path() / ("slab_accept_run" + std::to_string(run));
      c8.out_dir = dir.string();
      std::ostringstream sink;
      if (run_verify(c8, sink) != 0) {
        ok = false;
        why = "verify run " + std::to_string(run) + " failed";
        break;
      }
      std::ifstream f(dir / "verify_report.json");
      if (!f || !(f >> payloads[run])) {
        ok = false;
        why = "could not read report " + std::to_string(run);
        break;
      }
      payloads[run].erase("timestamp_unix_ms");
    }
    if (ok && payloads[0].dump() != payloads[1].dump()) {
      ok = false;
      why = "payloads differ between runs";
    }
    if (ok && payloads[0].at("payload_hash") != payloads[1].at("payload_hash")) {
      ok = false;
      why = "payload hashes differ";
    }
    report_raw(8, ok, sw.seconds(), 240.0, why);
  }

  if (g_failures == 0) {
    std::printf("ACCEPTANCE: all 8 criteria pass\n");
    return 0;
  }
  std::printf("ACCEPTANCE: %d criterion(s) failing\n", g_failures);
  return 1;
}
