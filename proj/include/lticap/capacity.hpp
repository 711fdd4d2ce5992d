#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lticap/filters.hpp"

namespace lticap {

enum class DetectionScheme { Holevo, Homodyne, Heterodyne };

/// Lower-case CLI/CSV spelling: "holevo", "homodyne", "heterodyne".
std::string_view scheme_name(DetectionScheme scheme);
std::optional<DetectionScheme> parse_scheme(std::string_view name);

struct SolverConfig {
  double flux_tolerance_rel = 1e-9;
  double quadrature_tolerance_rel = 1e-8;
  int max_bisection_iters = 200;
  double bracket_growth_factor = 4.0;
  /// Replaces the channel's support hint as the integration window (rad/s).
  std::optional<double> frequency_window_override;

  /// Throws InvalidParameter on out-of-range settings.
  void validate() const;
};

/// Frequencies with |H(w)|^2 at or below this are never allocated any photons.
inline constexpr double kGainFloor = 1e-30;

/// Closed interval of non-negative detunings (rad/s).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Raised when the multiplier bracket or bisection cannot meet the flux target.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double bracket_lo, double bracket_hi)
      : std::runtime_error(what), bracket_lo_(bracket_lo), bracket_hi_(bracket_hi) {}
  double bracket_lo() const { return bracket_lo_; }
  double bracket_hi() const { return bracket_hi_; }

 private:
  double bracket_lo_;
  double bracket_hi_;
};

struct WaterfillSolution {
  DetectionScheme scheme = DetectionScheme::Holevo;
  /// beta for Holevo, beta_hom / beta_het for the coherent receivers.
  double lagrange_multiplier = 0.0;
  /// Support on w >= 0; the allocation is even, so the full support mirrors it.
  std::vector<Interval> support;
  double requested_flux = 0.0;  // photons/s
  double achieved_flux = 0.0;   // photons/s
  double capacity = 0.0;        // bits/s
  /// Set when the budget is too small to allocate anything resolvable; capacity is 0.
  bool degenerate = false;
  ChannelModel channel;

  /// n(w), photons per mode.
  double allocation(double omega) const;
  /// Two-sided measure of the support in Hz.
  double support_bandwidth_hz() const;
};

/// (2 S_N + 1)/4 for homodyne, (S_N + 1)/2 for heterodyne.
/// Throws InvalidParameter for Holevo or a negative S_N.
double measurement_noise_spectrum(double noise, DetectionScheme scheme);

/// max{[(exp(beta/|H|^2) - 1)^-1 - S_N] / |H|^2, 0}; throws for beta <= 0.
double hsw_allocation(const ChannelModel& channel, double beta, double omega);

/// Homodyne: max(beta/2 - S_hom/|H|^2, 0).  Heterodyne: max(beta - 2 S_het/|H|^2, 0).
double classical_allocation(const ChannelModel& channel, DetectionScheme scheme, double beta, double omega);

/// Same allocations on an already evaluated spectral point.
double allocation_at(const SpectralPoint& point, DetectionScheme scheme, double beta);

/// Finds the multiplier whose allocation spends exactly `flux` photons/s, then
/// evaluates the capacity of that allocation. flux == 0 yields a degenerate
/// all-zero solution; negative or non-finite flux throws InvalidParameter.
WaterfillSolution solve_flux_constraint(const ChannelModel& channel, DetectionScheme scheme, double flux,
                                        const SolverConfig& config = {});

/// Capacity in bits/s together with the optimal allocation.
WaterfillSolution capacity(const ChannelModel& channel, DetectionScheme scheme, double flux,
                           const SolverConfig& config = {});

}  // namespace lticap
