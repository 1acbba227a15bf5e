// Command-line front end. Subcommands run the verification suites, scenario
// field dumps, state-kernel builds, and the mode-algebra demo; every run
// writes a JSON report under the configured output directory.
//
// Exit codes: 0 all identities pass, 1 an identity failed, 2 the
// configuration is invalid, 3 an internal numeric failure.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "slab/cli.hpp"

namespace {

struct Options {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  bool out_set = false;
  double tol = 0.0;
  bool tol_set = false;
  bool dense = false;
};

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config_path,
                  "JSON config path (defaults to the bundled reference setup)");
  sub->add_option("--seed", opt.seed, "override the config seed")
      ->each([&opt](const std::string&) { opt.seed_set = true; });
  sub->add_option("--out", opt.out_dir, "override the output directory")
      ->each([&opt](const std::string&) { opt.out_set = true; });
  sub->add_option("--tol", opt.tol, "override the composed identity tolerance")
      ->each([&opt](const std::string&) { opt.tol_set = true; });
  sub->add_flag("--dense", opt.dense,
                "oracle mode: run the dense suites on the main grid (subject to the cap)");
}

slab::RunConfig make_config(const Options& opt) {
  slab::RunConfig cfg = opt.config_path.empty() ? slab::reference_config()
                                                : slab::load_config(opt.config_path);
  if (opt.seed_set) cfg.seed = opt.seed;
  if (opt.out_set) cfg.out_dir = opt.out_dir;
  if (opt.tol_set) cfg.tol_override = opt.tol;
  if (opt.dense) cfg.dense_main = true;
  slab::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice Dirac slab: identity suites, scenario dumps, state kernels, "
               "mode-algebra demos"};
  app.require_subcommand(1);

  Options opt;
  CLI::App* c_verify =
      app.add_subcommand("verify", "run the full identity suite and write a JSON report");
  CLI::App* c_scenario =
      app.add_subcommand("scenario", "solve the configured source and dump field slices");
  CLI::App* c_state =
      app.add_subcommand("state", "build the state kernels and their condition residuals");
  CLI::App* c_quantize =
      app.add_subcommand("quantize", "mode-algebra demo: property suites plus a worked star product");
  for (CLI::App* sub : {c_verify, c_scenario, c_state, c_quantize}) add_common(sub, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const slab::RunConfig cfg = make_config(opt);
    if (c_verify->parsed()) return slab::run_verify(cfg, std::cout);
    if (c_scenario->parsed()) return slab::run_scenario(cfg, std::cout);
    if (c_state->parsed()) return slab::run_state(cfg, std::cout);
    return slab::run_quantize(cfg, std::cout);
  } catch (const slab::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const slab::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const slab::DomainError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const slab::ShapeError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const slab::BundleError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const slab::TruncationError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal failure: " << e.what() << "\n";
    return 3;
  }
}
