#include "lticap/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <yaml-cpp/yaml.h>

namespace lticap::sweep {
namespace {

/// Walks a YAML document and turns every problem into a positioned ConfigError.
class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& field, const std::string& what) const {
    const auto mark = at.Mark();
    if (mark.is_null()) throw ConfigError(fmt::format("{}: {}: {}", source_, field, what));
    throw ConfigError(fmt::format("{}:{}:{}: {}: {}", source_, mark.line + 1, mark.column + 1, field, what));
  }

  void require_map(const YAML::Node& node, const std::string& field) const {
    if (!node.IsMap()) fail(node, field, "expected a mapping");
  }

  void reject_unknown(const YAML::Node& map, const std::string& field, std::set<std::string> allowed) const {
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.contains(key)) fail(kv.first, field.empty() ? key : field + "." + key, "unknown key");
    }
  }

  YAML::Node child(const YAML::Node& map, const std::string& key, const std::string& field) const {
    const YAML::Node n = map[key];
    if (!n) fail(map, join(field, key), "missing required key");
    return n;
  }

  double number(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a number");
    try {
      const double v = node.as<double>();
      if (!std::isfinite(v)) fail(node, field, "expected a finite number");
      return v;
    } catch (const YAML::BadConversion&) {
      fail(node, field, fmt::format("expected a number, got '{}'", node.Scalar()));
    }
  }

  double positive(const YAML::Node& node, const std::string& field) const {
    const double v = number(node, field);
    if (!(v > 0.0)) fail(node, field, "must be positive");
    return v;
  }

  int integer(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected an integer");
    try {
      return node.as<int>();
    } catch (const YAML::BadConversion&) {
      fail(node, field, fmt::format("expected an integer, got '{}'", node.Scalar()));
    }
  }

  std::string text(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a string");
    return node.Scalar();
  }

  static std::string join(const std::string& field, const std::string& key) {
    return field.empty() ? key : field + "." + key;
  }

 private:
  std::string source_;
};

std::pair<std::vector<double>, std::vector<double>> read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open response table '{}'", path.string()));
  std::vector<double> w, m;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double f = 0.0, mag = 0.0;
    if (!(ls >> f >> mag)) {
      if (w.empty() && line_no == 1) continue;  // header row
      throw ConfigError(fmt::format("{}:{}: expected 'detuning_hz,magnitude'", path.string(), line_no));
    }
    w.push_back(to_angular(Hertz{f}).value);
    m.push_back(mag);
  }
  return {std::move(w), std::move(m)};
}

FilterStage parse_stage(const Reader& r, const YAML::Node& node, const std::string& field,
                        const std::filesystem::path& base_dir) {
  r.require_map(node, field);
  const std::string shape = r.text(r.child(node, "shape", field), field + ".shape");
  const double gain_db = r.number(r.child(node, "peak_gain_db", field), field + ".peak_gain_db");
  try {
    if (shape == "butterworth4") {
      r.reject_unknown(node, field, {"shape", "peak_gain_db", "cutoff_hz", "law"});
      const double cutoff = r.positive(r.child(node, "cutoff_hz", field), field + ".cutoff_hz");
      ButterworthLaw law = ButterworthLaw::Reciprocal;
      if (node["law"]) {
        const auto name = r.text(node["law"], field + ".law");
        if (name == "standard") {
          law = ButterworthLaw::Standard;
        } else if (name != "reciprocal") {
          r.fail(node["law"], field + ".law", "expected 'reciprocal' or 'standard'");
        }
      }
      return {FilterShape::butterworth4(Hertz{cutoff}, law), gain_db};
    }
    if (shape == "flat") {
      r.reject_unknown(node, field, {"shape", "peak_gain_db", "bandwidth_hz"});
      const double bw = r.positive(r.child(node, "bandwidth_hz", field), field + ".bandwidth_hz");
      return {FilterShape::flat(Hertz{bw}), gain_db};
    }
    if (shape == "tabulated") {
      r.reject_unknown(node, field, {"shape", "peak_gain_db", "table"});
      std::filesystem::path table = r.text(r.child(node, "table", field), field + ".table");
      if (table.is_relative()) table = base_dir / table;
      auto [w, m] = read_table(table);
      return {FilterShape::tabulated(std::move(w), std::move(m)), gain_db};
    }
  } catch (const InvalidParameter& e) {
    r.fail(node, field, e.what());
  }
  r.fail(node["shape"], field + ".shape", "expected 'butterworth4', 'flat' or 'tabulated'");
}

std::vector<double> parse_flux(const Reader& r, const YAML::Node& node) {
  const std::string field = "flux_points";
  std::vector<double> out;
  if (node.IsSequence()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      const auto f = fmt::format("{}[{}]", field, i);
      const double v = r.number(node[i], f);
      if (v < 0.0) r.fail(node[i], f, "photon flux must be non-negative");
      out.push_back(v);
    }
  } else if (node.IsMap()) {
    r.reject_unknown(node, field, {"min", "max", "count", "spacing"});
    const double lo = r.number(r.child(node, "min", field), field + ".min");
    const double hi = r.number(r.child(node, "max", field), field + ".max");
    const int count = r.integer(r.child(node, "count", field), field + ".count");
    const std::string spacing = node["spacing"] ? r.text(node["spacing"], field + ".spacing") : "log";
    if (count < 1) r.fail(node["count"], field + ".count", "must be at least 1");
    if (lo < 0.0 || hi < lo) r.fail(node, field, "need 0 <= min <= max");
    if (spacing == "log") {
      if (!(lo > 0.0)) r.fail(node["min"], field + ".min", "log spacing needs a positive minimum");
      for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        out.push_back(i == count - 1 && count > 1 ? hi : lo * std::pow(hi / lo, t));
      }
    } else if (spacing == "linear") {
      for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        out.push_back(i == count - 1 && count > 1 ? hi : lo + (hi - lo) * t);
      }
    } else {
      r.fail(node["spacing"], field + ".spacing", "expected 'log' or 'linear'");
    }
  } else {
    r.fail(node, field, "expected a list of fluxes or a {min, max, count, spacing} range");
  }
  if (out.empty()) r.fail(node, field, "at least one flux point is required");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SolverConfig parse_solver(const Reader& r, const YAML::Node& node) {
  const std::string field = "solver";
  SolverConfig cfg;
  r.require_map(node, field);
  r.reject_unknown(node, field,
                   {"flux_tolerance_rel", "quadrature_tolerance_rel", "max_bisection_iters",
                    "bracket_growth_factor", "frequency_window_hz"});
  if (node["flux_tolerance_rel"]) {
    cfg.flux_tolerance_rel = r.number(node["flux_tolerance_rel"], field + ".flux_tolerance_rel");
  }
  if (node["quadrature_tolerance_rel"]) {
    cfg.quadrature_tolerance_rel = r.number(node["quadrature_tolerance_rel"], field + ".quadrature_tolerance_rel");
  }
  if (node["max_bisection_iters"]) {
    cfg.max_bisection_iters = r.integer(node["max_bisection_iters"], field + ".max_bisection_iters");
  }
  if (node["bracket_growth_factor"]) {
    cfg.bracket_growth_factor = r.number(node["bracket_growth_factor"], field + ".bracket_growth_factor");
  }
  if (node["frequency_window_hz"]) {
    cfg.frequency_window_override =
        to_angular(Hertz{r.positive(node["frequency_window_hz"], field + ".frequency_window_hz")}).value;
  }
  try {
    cfg.validate();
  } catch (const InvalidParameter& e) {
    r.fail(node, field, e.what());
  }
  return cfg;
}

std::string fmt_number(double v) { return fmt::format("{}", v); }

}  // namespace

SweepConfig parse_config(std::string_view yaml_text, const std::filesystem::path& base_dir,
                         const std::string& source_name) {
  const Reader r(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("{}:{}:{}: syntax error: {}", source_name, e.mark.line + 1, e.mark.column + 1,
                                  e.msg));
  }
  if (!root.IsMap()) throw ConfigError(fmt::format("{}: top level must be a mapping", source_name));
  r.reject_unknown(root, "",
                   {"schema_version", "environment", "stages", "schemes", "flux_points", "solver", "output_path"});

  const int version = r.integer(r.child(root, "schema_version", ""), "schema_version");
  if (version != kSchemaVersion) {
    r.fail(root["schema_version"], "schema_version", fmt::format("unsupported version {}", version));
  }

  SweepConfig cfg;
  const auto env = r.child(root, "environment", "");
  r.require_map(env, "environment");
  r.reject_unknown(env, "environment", {"wavelength_nm", "carrier_hz", "temperature_k"});
  const double temperature = r.number(r.child(env, "temperature_k", "environment"), "environment.temperature_k");
  if (temperature < 0.0) r.fail(env["temperature_k"], "environment.temperature_k", "must be non-negative");
  if (static_cast<bool>(env["wavelength_nm"]) == static_cast<bool>(env["carrier_hz"])) {
    r.fail(env, "environment", "give exactly one of wavelength_nm or carrier_hz");
  }
  cfg.environment =
      env["wavelength_nm"]
          ? PhysicalEnvironment::from_wavelength(
                r.positive(env["wavelength_nm"], "environment.wavelength_nm") * 1e-9, temperature)
          : PhysicalEnvironment::from_carrier_hz(r.positive(env["carrier_hz"], "environment.carrier_hz"),
                                                 temperature);

  const auto stages = r.child(root, "stages", "");
  if (!stages.IsSequence() || stages.size() == 0) r.fail(stages, "stages", "expected a non-empty list");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    cfg.stages.push_back(parse_stage(r, stages[i], fmt::format("stages[{}]", i), base_dir));
  }

  const auto schemes = r.child(root, "schemes", "");
  if (!schemes.IsSequence() || schemes.size() == 0) r.fail(schemes, "schemes", "expected a non-empty list");
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    const auto f = fmt::format("schemes[{}]", i);
    const auto s = parse_scheme(r.text(schemes[i], f));
    if (!s) r.fail(schemes[i], f, "expected 'holevo', 'homodyne' or 'heterodyne'");
    cfg.schemes.push_back(*s);
  }
  std::sort(cfg.schemes.begin(), cfg.schemes.end(),
            [](auto a, auto b) { return scheme_name(a) < scheme_name(b); });
  cfg.schemes.erase(std::unique(cfg.schemes.begin(), cfg.schemes.end()), cfg.schemes.end());

  cfg.flux_points = parse_flux(r, r.child(root, "flux_points", ""));
  if (root["solver"]) cfg.solver = parse_solver(r, root["solver"]);
  if (root["output_path"]) {
    std::filesystem::path out = r.text(root["output_path"], "output_path");
    cfg.output_path = out.is_relative() && !base_dir.empty() ? base_dir / out : out;
  }
  return cfg;
}

SweepConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path(), path.string());
}

std::vector<SweepRow> run_sweep(const SweepConfig& config, int threads) {
  const ChannelModel channel = config.channel();
  std::vector<SweepRow> rows;
  for (double f : config.flux_points) {
    for (auto s : config.schemes) {
      SweepRow row;
      row.flux = f;
      row.scheme = s;
      rows.push_back(std::move(row));
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      auto& row = rows[i];
      try {
        const auto sol = capacity(channel, row.scheme, row.flux, config.solver);
        row.capacity = sol.capacity;
        row.lagrange_multiplier = sol.lagrange_multiplier;
        row.achieved_flux = sol.achieved_flux;
        row.support_hz = sol.support_bandwidth_hz();
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
    }
  };
  const int n = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(rows.size(), 1)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  const bool failed = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.ok; });
  out << "# lticap capacity sweep\n";
  out << "# units: flux photons/s, capacity bits/s, support Hz (two-sided)\n";
  out << "flux_photons_per_s,scheme,capacity_bits_per_s,lagrange_multiplier,achieved_flux,support_hz";
  out << (failed ? ",status\n" : "\n");
  for (const auto& r : rows) {
    out << fmt_number(r.flux) << ',' << scheme_name(r.scheme) << ',';
    if (r.ok) {
      out << fmt_number(r.capacity) << ',' << fmt_number(r.lagrange_multiplier) << ','
          << fmt_number(r.achieved_flux) << ',' << fmt_number(r.support_hz);
    } else {
      out << ",,,";
    }
    if (failed) out << ',' << (r.ok ? "ok" : "solver_failure");
    out << '\n';
  }
  out.flush();
}

std::vector<SpectrumSample> dump_spectra(const SweepConfig& config, double flux, DetectionScheme scheme,
                                         int points) {
  if (points < 2) throw InvalidParameter("spectrum dump needs at least two grid points");
  const ChannelModel channel = config.channel();
  const auto sol = capacity(channel, scheme, flux, config.solver);
  double edge = 0.0;
  for (const auto& iv : sol.support) edge = std::max(edge, iv.hi);
  if (edge == 0.0) edge = config.solver.frequency_window_override.value_or(channel.support_hint());
  edge *= 1.2;

  std::vector<SpectrumSample> out;
  out.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double w = -edge + 2.0 * edge * i / (points - 1);
    const auto p = channel.at(w);
    out.push_back({to_hertz(RadiansPerSecond{w}).value, p.squared_magnitude, p.noise, sol.allocation(w)});
  }
  return out;
}

void write_spectra_csv(std::ostream& out, const std::vector<SpectrumSample>& samples) {
  out << "detuning_hz,squared_magnitude,noise_spectrum,allocation\n";
  for (const auto& s : samples) {
    out << fmt_number(s.detuning_hz) << ',' << fmt_number(s.squared_magnitude) << ','
        << fmt_number(s.noise_spectrum) << ',' << fmt_number(s.allocation) << '\n';
  }
  out.flush();
}

}  // namespace lticap::sweep
