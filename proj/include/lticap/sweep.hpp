#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lticap/capacity.hpp"
#include "lticap/filters.hpp"
#include "lticap/physics.hpp"

namespace lticap::sweep {

inline constexpr int kSchemaVersion = 1;

/// Schema violation in a sweep configuration. The message carries the source
/// position and the offending field, e.g. "attenuator_first.yaml:7:5: stages[1].cutoff_hz: ...".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parsed sweep configuration. Frequencies are already in rad/s and the
/// flux list is sorted ascending.
struct SweepConfig {
  PhysicalEnvironment environment{RadiansPerSecond{1.0}, 0.0};
  std::vector<FilterStage> stages;
  std::vector<DetectionScheme> schemes;  // sorted by scheme name, unique
  std::vector<double> flux_points;       // photons/s, >= 0
  SolverConfig solver;
  std::optional<std::filesystem::path> output_path;

  ChannelModel channel() const { return cascade(stages, environment); }
};

SweepConfig parse_config(std::string_view yaml_text, const std::filesystem::path& base_dir = {},
                         const std::string& source_name = "config");
SweepConfig load_config(const std::filesystem::path& path);

struct SweepRow {
  double flux = 0.0;
  DetectionScheme scheme = DetectionScheme::Holevo;
  double capacity = 0.0;
  double lagrange_multiplier = 0.0;
  double achieved_flux = 0.0;
  double support_hz = 0.0;
  bool ok = true;
  std::string error;  // solver diagnostic when !ok
};

/// One row per (flux, scheme), ordered by flux then scheme name. Points run on
/// up to `threads` workers; the order of the result never depends on it.
std::vector<SweepRow> run_sweep(const SweepConfig& config, int threads = 1);

/// Writes the sweep CSV. A trailing `status` column is added only when some row failed.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct SpectrumSample {
  double detuning_hz = 0.0;
  double squared_magnitude = 0.0;
  double noise_spectrum = 0.0;
  double allocation = 0.0;
};

/// Uniform grid over the allocation support widened by 20% on each side
/// (the channel window when nothing is allocated).
std::vector<SpectrumSample> dump_spectra(const SweepConfig& config, double flux, DetectionScheme scheme,
                                         int points = 2048);

void write_spectra_csv(std::ostream& out, const std::vector<SpectrumSample>& samples);

}  // namespace lticap::sweep
