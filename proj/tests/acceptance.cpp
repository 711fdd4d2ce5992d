// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance 3 5        run the listed criteria only
//
// Exit status is 0 only if every selected criterion passes.

#include <boost/math/special_functions/log1p.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "lticap/capacity.hpp"
#include "lticap/entropy.hpp"
#include "lticap/oracle.hpp"
#include "lticap/physics.hpp"
#include "lticap/sweep.hpp"

namespace fs = std::filesystem;
using namespace lticap;

namespace {

// Pinned tolerances and limits.
constexpr double kEntropyTol = 1e-12;
constexpr int kEntropyPoints = 10'000;
constexpr double kEntropySeconds = 1.0;

constexpr double kSingleModeTol = 1e-6;
constexpr double kSingleModeSeconds = 10.0;

constexpr double kKktTol = 1e-9;
constexpr int kKktPoints = 512;
constexpr double kKktSeconds = 30.0;

constexpr double kDiscreteGapTol = 1e-3;
constexpr double kDiscreteSeconds = 60.0;

constexpr int kSweepPoints = 25;
constexpr double kSweepSeconds = 120.0;
// Numerical slack for the orderings and shape checks, relative to the values
// compared; ten times the default quadrature tolerance.
constexpr double kSweepSlack = 1e-7;

constexpr double kRatioGapTol = 0.05;
constexpr double kRatioSeconds = 1.0;

constexpr double kFluxTol = 1e-9;

constexpr DetectionScheme kSchemes[] = {DetectionScheme::Holevo, DetectionScheme::Homodyne,
                                        DetectionScheme::Heterodyne};

const fs::path kConfigs = LTICAP_CONFIG_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

ChannelModel butterworth_cascade(bool amplifier_first) {
  const auto env = PhysicalEnvironment::from_wavelength(1550e-9, 300.0);
  const auto b = FilterShape::butterworth4(Hertz{20e9});
  std::vector<FilterStage> st{{b, -20.0}, {b, 20.0}};
  if (amplifier_first) std::swap(st[0], st[1]);
  return cascade(st, env);
}

// ---------------------------------------------------------------------------

Outcome entropy_accuracy() {
  using Big = boost::multiprecision::cpp_bin_float_50;
  const auto t0 = Clock::now();
  double worst = 0.0, worst_x = 0.0;
  for (int i = 0; i < kEntropyPoints; ++i) {
    const double x = std::pow(10.0, -30.0 + 45.0 * i / (kEntropyPoints - 1));
    const Big bx = x;
    const Big ref = ((bx + 1) * boost::math::log1p(bx) - bx * log(bx)) / log(Big(2));
    const double err = rel(thermal_entropy_bits(x), static_cast<double>(ref));
    if (err > worst) {
      worst = err;
      worst_x = x;
    }
  }
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = worst <= kEntropyTol && dt < kEntropySeconds;
  o.detail = fmt::format("max rel err {:.2e} at x={:.3e} (tol {:.0e}), {:.3f} s (limit {} s)", worst, worst_x,
                         kEntropyTol, dt, kEntropySeconds);
  return o;
}

// ---------------------------------------------------------------------------

Outcome single_mode_equivalence() {
  const auto t0 = Clock::now();
  const double bandwidth_hz = 10e9;
  const double carrier = to_angular(Hertz{constants::speed_of_light / 1550e-9}).value;
  auto temperature_for = [&](double occupancy) {
    return constants::hbar * carrier / (constants::boltzmann * std::log1p(1.0 / occupancy));
  };

  struct Case {
    std::string label;
    double gain;
    double temperature;
    bool amplifier;
  };
  std::vector<Case> cases;
  for (double eta : {0.1, 0.5, 1.0}) cases.push_back({fmt::format("pure-loss eta={}", eta), eta, 0.0, false});
  for (double n : {0.1, 1.0, 10.0}) cases.push_back({fmt::format("thermal eta=0.5 N_env={}", n), 0.5, temperature_for(n), false});
  for (double k : {2.0, 100.0}) cases.push_back({fmt::format("amplifier kappa={}", k), k, 0.0, true});

  Outcome o;
  double worst = 0.0;
  int solves = 0;
  for (const auto& c : cases) {
    const PhysicalEnvironment env(RadiansPerSecond{carrier}, c.temperature);
    const double n_env = thermal_occupancy(env);
    const std::vector<FilterStage> st{{FilterShape::flat(Hertz{bandwidth_hz}), 10.0 * std::log10(c.gain)}};
    const auto ch = cascade(st, env);
    const double gain = ch.squared_magnitude(0.0);
    for (double ns : {0.01, 1.0, 100.0}) {
      oracle::SingleModeChannel sm{oracle::PureLoss{gain}, ns};
      if (c.amplifier) {
        sm.kind = oracle::Amplifier{gain, n_env};
      } else if (c.temperature > 0.0) {
        sm.kind = oracle::ThermalNoise{gain, n_env};
      }
      for (auto s : kSchemes) {
        const double expect = bandwidth_hz * oracle::single_mode_capacity(sm, s);
        const double got = capacity(ch, s, ns * bandwidth_hz).capacity;
        const double err = rel(got, expect);
        ++solves;
        worst = std::max(worst, err);
        if (err > kSingleModeTol) {
          o.pass = false;
          o.notes.push_back(fmt::format("{} N_S={} {}: rel err {:.2e}", c.label, ns, scheme_name(s), err));
        }
      }
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= kSingleModeSeconds) o.pass = false;
  o.detail = fmt::format("{} solves, max rel err {:.2e} (tol {:.0e}), {:.3f} s (limit {} s)", solves, worst,
                         kSingleModeTol, dt, kSingleModeSeconds);
  return o;
}

// ---------------------------------------------------------------------------

Outcome water_level_invariants() {
  const auto t0 = Clock::now();
  const auto ch = butterworth_cascade(false);
  Outcome o;
  double worst = 0.0;
  int checked = 0;
  for (double flux : {1e10, 1e12, 1e14}) {
    for (auto s : kSchemes) {
      const auto sol = solve_flux_constraint(ch, s, flux);
      double measure = 0.0;
      for (const auto& iv : sol.support) measure += iv.hi - iv.lo;
      if (sol.support.empty() || !(measure > 0.0)) {
        o.pass = false;
        o.notes.push_back(fmt::format("P={:.0e} {}: empty support", flux, scheme_name(s)));
        continue;
      }
      // Spread the points over the support intervals in proportion to length,
      // strictly inside each one.
      const double beta = sol.lagrange_multiplier;
      for (int i = 0; i < kKktPoints; ++i) {
        double u = measure * (i + 0.5) / kKktPoints;
        double w = 0.0;
        for (const auto& iv : sol.support) {
          const double len = iv.hi - iv.lo;
          if (u <= len) {
            w = iv.lo + u;
            break;
          }
          u -= len;
        }
        const auto p = ch.at(w);
        const double n = sol.allocation(w);
        double lhs = 0.0, rhs = 0.0;
        switch (s) {
          case DetectionScheme::Holevo:
            lhs = p.squared_magnitude * n + p.noise;
            rhs = 1.0 / std::expm1(beta / p.squared_magnitude);
            break;
          case DetectionScheme::Homodyne:
            lhs = n + measurement_noise_spectrum(p.noise, s) / p.squared_magnitude;
            rhs = beta / 2.0;
            break;
          case DetectionScheme::Heterodyne:
            lhs = n + 2.0 * measurement_noise_spectrum(p.noise, s) / p.squared_magnitude;
            rhs = beta;
            break;
        }
        const double err = rel(lhs, rhs);
        worst = std::max(worst, err);
        ++checked;
        if (!(err <= kKktTol) || !(n > 0.0)) {
          if (o.pass) {
            o.notes.push_back(fmt::format("P={:.0e} {} w={:.6e}: rel err {:.2e}, n={:.3e}", flux, scheme_name(s), w,
                                          err, n));
          }
          o.pass = false;
        }
      }
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= kKktSeconds) o.pass = false;
  o.detail = fmt::format("{} support points, max rel err {:.2e} (tol {:.0e}), {:.3f} s (limit {} s)", checked, worst,
                         kKktTol, dt, kKktSeconds);
  return o;
}

// ---------------------------------------------------------------------------

Outcome discrete_convergence() {
  const auto t0 = Clock::now();
  const auto ch = butterworth_cascade(false);
  const double flux = 1e12;
  const double cutoff_hz = 20e9;
  const double c = capacity(ch, DetectionScheme::Holevo, flux).capacity;
  // Guard band held fixed at 1e-3 of the longest symbol while T_s grows.
  const double guard = 1e-3 * 1e4 / cutoff_hz;
  Outcome o;
  std::vector<double> gaps;
  for (double tb : {1e2, 1e3, 1e4}) {
    const auto p = oracle::discretize(ch, tb / cutoff_hz, guard, flux);
    const double d = oracle::discrete_capacity(p, DetectionScheme::Holevo);
    gaps.push_back(std::abs(d - c) / c);
    o.notes.push_back(fmt::format("T_s wc/2pi={:.0e}: {} modes, discrete {:.10e}, gap {:.3e}", tb, p.gains.size(), d,
                                  gaps.back()));
  }
  const bool monotone = gaps[1] < gaps[0] && gaps[2] < gaps[1];
  const double dt = seconds_since(t0);
  o.pass = monotone && gaps.back() < kDiscreteGapTol && dt < kDiscreteSeconds;
  o.detail = fmt::format("continuous {:.10e} bits/s, gaps {:.2e} > {:.2e} > {:.2e} {}, final < {:.0e}, {:.3f} s (limit {} s)",
                         c, gaps[0], gaps[1], gaps[2], monotone ? "monotone" : "NOT monotone", kDiscreteGapTol, dt,
                         kDiscreteSeconds);
  return o;
}

// ---------------------------------------------------------------------------

struct Curves {
  std::vector<double> flux;
  // Indexed by DetectionScheme.
  std::vector<double> c[3];
};

Curves sweep_curves(const std::string& file) {
  auto cfg = sweep::load_config(kConfigs / file);
  const auto rows = sweep::run_sweep(cfg, 4);
  Curves out;
  out.flux = cfg.flux_points;
  for (const auto& r : rows) {
    if (!r.ok) throw std::runtime_error(fmt::format("{}: solver failed at {}: {}", file, r.flux, r.error));
    out.c[static_cast<int>(r.scheme)].push_back(r.capacity);
  }
  return out;
}

Outcome sweep_properties() {
  const auto t0 = Clock::now();
  const Curves cfg[2] = {sweep_curves("attenuator_first.yaml"), sweep_curves("amplifier_first.yaml")};
  const int hsw = static_cast<int>(DetectionScheme::Holevo);
  const int hom = static_cast<int>(DetectionScheme::Homodyne);
  const int het = static_cast<int>(DetectionScheme::Heterodyne);
  Outcome o;
  const auto& p = cfg[0].flux;
  if (static_cast<int>(p.size()) != kSweepPoints || rel(p.front(), 1e9) > 1e-12 || rel(p.back(), 1e15) > 1e-12) {
    o.pass = false;
    o.detail = "sweep grid is not 25 log points over [1e9, 1e15]";
    return o;
  }
  auto ge = [](double a, double b) { return a >= b * (1.0 - kSweepSlack); };

  // (a) ordering at every point
  int bad_a = 0;
  std::string first_a;
  for (int k = 0; k < 2; ++k) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double h = cfg[k].c[hsw][i], t = cfg[k].c[het][i], m = cfg[k].c[hom][i];
      if (!ge(h, t) || !ge(t, m)) {
        if (bad_a++ == 0) {
          first_a = fmt::format("config {} P={:.3e}: holevo {:.6e}, het {:.6e}, hom {:.6e}", k + 1, p[i], h, t, m);
        }
      }
    }
  }
  o.notes.push_back(bad_a == 0 ? "(a) holevo >= het >= hom at all 50 points: ok"
                               : fmt::format("(a) holevo >= het >= hom violated at {} of 50 points; first: {}", bad_a,
                                             first_a));

  // (b) configuration 2 dominates configuration 1
  int bad_b = 0;
  for (int s = 0; s < 3; ++s) {
    for (std::size_t i = 0; i < p.size(); ++i) bad_b += !ge(cfg[1].c[s][i], cfg[0].c[s][i]);
  }
  o.notes.push_back(bad_b == 0 ? "(b) configuration 2 >= configuration 1 at all 75 cells: ok"
                               : fmt::format("(b) configuration 2 < configuration 1 at {} of 75 cells", bad_b));

  // (c) nondecreasing, and concave in P via divided second differences on the log grid
  int bad_c = 0;
  std::string first_c;
  for (int k = 0; k < 2; ++k) {
    for (int s = 0; s < 3; ++s) {
      const auto& c = cfg[k].c[s];
      for (std::size_t i = 1; i < p.size(); ++i) {
        if (!(c[i] >= c[i - 1]) && bad_c++ == 0) {
          first_c = fmt::format("config {} {} decreases at P={:.3e}", k + 1, scheme_name(kSchemes[s]), p[i]);
        }
      }
      for (std::size_t i = 2; i < p.size(); ++i) {
        const double left = (c[i - 1] - c[i - 2]) / (p[i - 1] - p[i - 2]);
        const double right = (c[i] - c[i - 1]) / (p[i] - p[i - 1]);
        if (right > left * (1.0 + kSweepSlack) && bad_c++ == 0) {
          first_c = fmt::format("config {} {} convex at P={:.3e}", k + 1, scheme_name(kSchemes[s]), p[i - 1]);
        }
      }
    }
  }
  o.notes.push_back(bad_c == 0 ? "(c) all six curves nondecreasing and concave in P: ok"
                               : fmt::format("(c) {} shape violations; first: {}", bad_c, first_c));

  // (d) het/holevo nondecreasing over the top two decades
  int bad_d = 0;
  std::string trace[2];
  for (int k = 0; k < 2; ++k) {
    double prev = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] < 1e13 * (1.0 - 1e-12)) continue;
      const double r = cfg[k].c[het][i] / cfg[k].c[hsw][i];
      trace[k] += fmt::format(" {:.5f}", r);
      if (r < prev * (1.0 - kSweepSlack)) ++bad_d;
      prev = r;
    }
  }
  o.notes.push_back(fmt::format("(d) het/holevo over [1e13, 1e15]: {} ({} decreases)", bad_d == 0 ? "ok" : "violated",
                                bad_d));
  o.notes.push_back(fmt::format("    configuration 1:{}", trace[0]));
  o.notes.push_back(fmt::format("    configuration 2:{}", trace[1]));

  const double dt = seconds_since(t0);
  o.pass = bad_a == 0 && bad_b == 0 && bad_c == 0 && bad_d == 0 && dt < kSweepSeconds;
  o.detail = fmt::format("a:{} b:{} c:{} d:{}, slack {:.0e}, {:.3f} s (limit {} s)", bad_a == 0 ? "ok" : "FAIL",
                         bad_b == 0 ? "ok" : "FAIL", bad_c == 0 ? "ok" : "FAIL", bad_d == 0 ? "ok" : "FAIL",
                         kSweepSlack, dt, kSweepSeconds);
  return o;
}

// ---------------------------------------------------------------------------

Outcome pure_loss_asymptotics() {
  const auto t0 = Clock::now();
  auto ratio = [](double ns) {
    const oracle::SingleModeChannel ch{oracle::PureLoss{0.5}, ns};
    return oracle::single_mode_capacity(ch, DetectionScheme::Heterodyne) /
           oracle::single_mode_capacity(ch, DetectionScheme::Holevo);
  };
  const double r3 = ratio(1e3), r6 = ratio(1e6);
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = r6 > r3 && 1.0 - r6 < kRatioGapTol && dt < kRatioSeconds;
  o.detail = fmt::format("ratio(1e3)={:.8f}, ratio(1e6)={:.8f}, 1-ratio(1e6)={:.5f} (need < {}), {:.4f} s", r3, r6,
                         1.0 - r6, kRatioGapTol, dt);
  return o;
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

Outcome determinism_and_flux() {
  const auto t0 = Clock::now();
  Outcome o;
  const fs::path tmp = fs::temp_directory_path() / "lticap_acceptance";
  fs::create_directories(tmp);
  int rows_checked = 0;
  double worst = 0.0;
  for (const std::string name : {"attenuator_first", "amplifier_first"}) {
    std::vector<std::string> outputs;
    for (const std::string threads : {"1", "1", "4"}) {
      const fs::path out = tmp / fmt::format("{}_{}_{}.csv", name, threads, outputs.size());
      const std::string cmd = fmt::format("\"{}\" sweep --config \"{}\" --output \"{}\" --threads {}", LTICAP_CLI,
                                          (kConfigs / (name + ".yaml")).string(), out.string(), threads);
      const int status = std::system(cmd.c_str());
      if (status != 0) {
        o.pass = false;
        o.notes.push_back(fmt::format("{}: CLI exited with status {}", name, status));
      }
      outputs.push_back(slurp(out));
    }
    if (outputs[0].empty() || outputs[0] != outputs[1] || outputs[0] != outputs[2]) {
      o.pass = false;
      o.notes.push_back(fmt::format("{}: CSV output differs between runs", name));
    }
    for (const auto& cells : csv_rows(outputs[0])) {
      if (cells.size() != 6) {
        o.pass = false;
        o.notes.push_back(fmt::format("{}: malformed row", name));
        continue;
      }
      const double requested = std::stod(cells[0]);
      const double achieved = std::stod(cells[4]);
      const double err = requested == 0.0 ? std::abs(achieved) : rel(achieved, requested);
      worst = std::max(worst, err);
      ++rows_checked;
      if (!(err <= kFluxTol)) {
        o.pass = false;
        o.notes.push_back(fmt::format("{}: P={} {}: achieved flux rel err {:.2e}", name, cells[0], cells[1], err));
      }
    }
  }
  fs::remove_all(tmp);
  o.detail = fmt::format("3 runs x 2 configs byte-identical: {}, {} rows, max flux rel err {:.2e} (tol {:.0e}), {:.3f} s",
                         o.notes.empty() ? "yes" : "see notes", rows_checked, worst, kFluxTol, seconds_since(t0));
  return o;
}

struct Criterion {
  std::string id;
  std::string title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"1", "entropy function accuracy", entropy_accuracy},
      {"2", "single-mode oracle equivalence", single_mode_equivalence},
      {"3", "water-level invariants", water_level_invariants},
      {"4", "discrete-continuum convergence", discrete_convergence},
      {"5", "capacity curve properties", sweep_properties},
      {"6", "pure-loss heterodyne/holevo asymptotics", pure_loss_asymptotics},
      {"7", "determinism and flux conservation", determinism_and_flux},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = fmt::format("exception: {}", e.what());
    }
    failures += !o.pass;
    std::cout << fmt::format("{} criterion {}: {}: {}\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail);
    for (const auto& n : o.notes) std::cout << "       " << n << "\n";
    std::cout.flush();
  }
  return failures == 0 ? 0 : 1;
}
