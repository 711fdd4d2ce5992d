// capacity: command-line front end for the LTI bosonic channel capacity solvers.
//
//   capacity sweep   --config <path> [--output <path>] [--threads <n>] [--verbose]
//   capacity spectra --config <path> --flux <photons/s> --scheme <name> [--output <path>] [--points <n>]
//
// Exit codes: 0 success, 2 configuration or usage error, 3 solver failure.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

#include <fmt/format.h>

#include "lticap/sweep.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct Options {
  std::string config;
  std::string output;
  int threads = 1;
  bool verbose = false;
  double flux = 0.0;
  std::string scheme;
  int points = 2048;
};

template <class Write>
int emit(const std::string& path, Write&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return kExitConfig;
  }
  write(out);
  return 0;
}

int run_sweep(const Options& opt) {
  using namespace lticap;
  const auto cfg = sweep::load_config(opt.config);
  const auto start = std::chrono::steady_clock::now();
  const auto rows = sweep::run_sweep(cfg, opt.threads);
  std::string path = opt.output;
  if (path.empty() && cfg.output_path) path = cfg.output_path->string();
  if (int rc = emit(path, [&](std::ostream& os) { sweep::write_sweep_csv(os, rows); }); rc != 0) return rc;

  int rc = 0;
  for (const auto& r : rows) {
    if (!r.ok) {
      std::cerr << fmt::format("error: solver failed at flux {} for {}: {}\n", r.flux, scheme_name(r.scheme),
                               r.error);
      rc = kExitSolver;
    }
  }
  if (opt.verbose) {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    std::cerr << fmt::format("{} rows in {:.3f} s on {} thread(s)\n", rows.size(), dt.count(), opt.threads);
  }
  return rc;
}

int run_spectra(const Options& opt) {
  using namespace lticap;
  const auto cfg = sweep::load_config(opt.config);
  const auto scheme = parse_scheme(opt.scheme);
  if (!scheme) {
    std::cerr << "error: --scheme: expected holevo, homodyne or heterodyne\n";
    return kExitConfig;
  }
  if (!(opt.flux >= 0.0)) {
    std::cerr << "error: --flux must be non-negative\n";
    return kExitConfig;
  }
  const auto samples = sweep::dump_spectra(cfg, opt.flux, *scheme, opt.points);
  if (opt.verbose) std::cerr << fmt::format("{} spectral samples\n", samples.size());
  return emit(opt.output, [&](std::ostream& os) { sweep::write_spectra_csv(os, samples); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacities of a linear time-invariant bosonic channel with thermal noise"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--threads", opt.threads, "Worker threads for sweep points")->check(CLI::PositiveNumber);
  app.add_flag("--verbose", opt.verbose, "Progress and timing on stderr");

  auto* sweep_cmd = app.add_subcommand("sweep", "Capacity versus photon flux for every configured scheme");
  sweep_cmd->add_option("--config", opt.config, "YAML sweep configuration")->required();
  sweep_cmd->add_option("--output", opt.output, "CSV destination (default: config output_path or stdout)");
  sweep_cmd->fallthrough();

  auto* spectra_cmd = app.add_subcommand("spectra", "Dump |H|^2, S_N and the optimal allocation on a grid");
  spectra_cmd->add_option("--config", opt.config, "YAML sweep configuration")->required();
  spectra_cmd->add_option("--flux", opt.flux, "Photon flux, photons/s")->required();
  spectra_cmd->add_option("--scheme", opt.scheme, "holevo | homodyne | heterodyne")->required();
  spectra_cmd->add_option("--output", opt.output, "CSV destination (default: stdout)");
  spectra_cmd->add_option("--points", opt.points, "Grid size")->check(CLI::Range(2, 10'000'000));
  spectra_cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sweep_cmd) return run_sweep(opt);
    return run_spectra(opt);
  } catch (const lticap::sweep::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const lticap::InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const lticap::SolverFailure& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
}
