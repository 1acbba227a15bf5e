#pragma once

// Subcommand bodies behind the command-line tool. Each one takes a validated
// RunConfig, prints human-readable progress to the given stream, writes its
// JSON report (and any field dumps) under cfg.out_dir, and returns the
// process exit code: 0 all blocking items pass, 1 an identity failed. Config
// and numeric failures are thrown and mapped to 2 and 3 by the tool itself.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "slab/config.hpp"
#include "slab/report.hpp"
#include "slab/verify.hpp"

namespace slab {

namespace detail {

inline std::string ensure_out_dir(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  return cfg.out_dir;
}

inline void print_items(const std::vector<VerifyItem>& items, std::ostream& os) {
  for (const VerifyItem& it : items) {
    const char* tag = it.pass ? (it.blocking ? "PASS" : "info") : "FAIL";
    os << tag << "  " << std::left << std::setw(34) << it.id << std::right
       << std::scientific << std::setprecision(3) << it.max_residual << "  tol "
       << std::setprecision(1) << it.tolerance;
    if (!it.note.empty()) os << "  (" << it.note << ")";
    os << "\n" << std::defaultfloat;
  }
}

// Kernel matrices go to a self-describing little-endian container:
// magic "SLABKER1", then int64 rows, cols, then row-major (re, im) doubles.
inline void save_kernel_binary(const MatC& k, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cli: cannot write " + path);
  f.write("SLABKER1", 8);
  const std::int64_t rows = k.rows(), cols = k.cols();
  f.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  f.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < cols; ++j) {
      const double re = k(i, j).real(), im = k(i, j).imag();
      f.write(reinterpret_cast<const char*>(&re), sizeof re);
      f.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
}

inline void dump_section(const SpinorSection& s, const std::string& stem,
                         const std::string& format) {
  if (format == "csv" || format == "both") save_csv(s, stem + ".csv");
  if (format == "binary" || format == "both") save_binary(s, stem + ".bin");
}

inline SpinorSection scenario_source(const RunConfig& cfg, const SpacetimeGrid& g) {
  SpinorSection s(g, Charge::uncharged, Leg::spinor);
  if (cfg.scenario.source == "zero") return s;
  if (cfg.scenario.source == "delta") {
    s.at(cfg.scenario.t, g.xflat(cfg.scenario.x), cfg.scenario.component) = cplx(1.0, 0.0);
    return s;
  }
  Rng rng(cfg.seed);
  return interior_random(g, rng, Charge::uncharged, Leg::spinor);
}

}  // namespace detail

inline int finish_report(Report& rep, const std::string& filename, std::ostream& os) {
  const std::string dir = detail::ensure_out_dir(rep.config);
  const std::string path = dir + "/" + filename;
  write_report(rep, path);
  os << (rep.all_pass() ? "PASS" : "FAIL") << "  report " << path << "  payload "
     << payload_hash(rep) << "\n";
  return rep.all_pass() ? 0 : 1;
}

inline int run_verify(const RunConfig& cfg, std::ostream& os) {
  SuiteResult res = run_full_suite(cfg);
  detail::print_items(res.items, os);
  Report rep{"verify", cfg, std::move(res.items), std::move(res.extras)};
  return finish_report(rep, "verify_report.json", os);
}

// Field dumps for the configured source: both Green solves of each operator
// and both Moller directions. Sources are restricted to interior rows and
// solves run without cone enforcement, so any configured source is legal on
// the periodic slab; support discipline is the verify suite's business.
inline int run_scenario(const RunConfig& cfg, std::ostream& os) {
  const CliffordRep rep_c = rep_of(cfg);
  const SpacetimeGrid g = grid_of(cfg);
  const MollerMap mm(rep_c, g, cfg.mass, potential_of(cfg, g));
  const SpinorSection src = detail::scenario_source(cfg, g);
  const std::string dir = detail::ensure_out_dir(cfg);
  const std::string& fmt = cfg.scenario.format;

  Report rep{"scenario", cfg, {}, json::object()};
  auto emit = [&](const char* name, const SpinorSection& s) {
    detail::dump_section(s, dir + "/scenario_" + name, fmt);
    rep.extras["norms"][name] = s.norm();
    os << "wrote scenario_" << name << " (|s| = " << s.norm() << ")\n";
  };
  emit("source", src);
  emit("retarded_free", mm.free_op.retarded(src, ConeCheck::off));
  emit("advanced_free", mm.free_op.advanced(src, ConeCheck::off));
  const SpinorSection moller = moller_apply(mm, src);
  emit("moller", moller);
  emit("moller_hat", moller_inverse_apply(mm, moller));
  emit("retarded_coupled", mm.coupled_op.retarded(entwine_i(src), ConeCheck::off));
  emit("advanced_coupled", mm.coupled_op.advanced(entwine_i(src), ConeCheck::off));
  return finish_report(rep, "scenario_report.json", os);
}

// State kernels and their condition residuals on the state grid.
inline int run_state(const RunConfig& cfg, std::ostream& os) {
  SuiteResult res = state_suite(cfg);
  detail::print_items(res.items, os);

  const CliffordRep rep_c = rep_of(cfg);
  const SpacetimeGrid gs = state_grid_of(cfg);
  const MollerMap mms(rep_c, gs, cfg.mass, potential_of(cfg, gs));
  const TwoPointState omega =
      build_vacuum_state(rep_c, gs, cfg.mass, policy_of(cfg), cfg.oracle_cap);
  const TwoPointState omega_g = pullback_state(omega, mms, cfg.oracle_cap);
  const std::string dir = detail::ensure_out_dir(cfg);
  detail::save_kernel_binary(omega.kernel, dir + "/state_free.bin");
  detail::save_kernel_binary(omega_g.kernel, dir + "/state_pullback.bin");
  os << "wrote state_free.bin and state_pullback.bin (" << omega.kernel.rows() << " x "
     << omega.kernel.cols() << ")\n";

  Report rep{"state", cfg, std::move(res.items), std::move(res.extras)};
  return finish_report(rep, "state_report.json", os);
}

// Mode-algebra demo: the property suites plus a small worked example whose
// functionals and star coefficients land in the report for inspection.
inline int run_quantize(const RunConfig& cfg, std::ostream& os) {
  const FuncalgContext fc = build_funcalg_context(cfg);
  SuiteResult res;
  res.items = funcalg_core_suite(cfg, fc);
  for (VerifyItem& it : funcalg_moller_suite(cfg, fc)) res.items.push_back(std::move(it));
  detail::print_items(res.items, os);

  const FermionicFunctional f = monomial(fc.basis, Charge::charged, {0, 1}, cplx(1.0, 0.0));
  const FermionicFunctional g = monomial(fc.basis, Charge::charged, {2}, cplx(0.0, 1.0));
  const HbarSeries fg = star(f, g, fc.basis, fc.omega_g);
  json sample;
  sample["f"] = functional_to_json(f);
  sample["g"] = functional_to_json(g);
  sample["moller_f"] = functional_to_json(algebra_moller(f, fc.basis));
  for (int n = 0; n <= fg.max_order(); ++n)
    sample["star_fg_order_" + std::to_string(n)] = functional_to_json(fg.at(n));
  res.extras["sample"] = std::move(sample);
  res.extras["mode_count"] = fc.basis.nmodes;
  res.extras["truncation_order"] = fc.basis.p_max;

  Report rep{"quantize", cfg, std::move(res.items), std::move(res.extras)};
  return finish_report(rep, "quantize_report.json", os);
}

}  // namespace slab
