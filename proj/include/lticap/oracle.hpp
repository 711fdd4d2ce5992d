#pragma once

#include <variant>
#include <vector>

#include "lticap/capacity.hpp"
#include "lticap/filters.hpp"

namespace lticap::oracle {

/// Attenuator with a vacuum environment, 0 < eta <= 1.
struct PureLoss {
  double transmissivity = 1.0;
};

/// Attenuator coupled to a thermal environment with mean photon number N_env.
struct ThermalNoise {
  double transmissivity = 1.0;
  double environment_photons = 0.0;
};

/// Phase-insensitive amplifier, gain kappa > 1.
struct Amplifier {
  double gain = 2.0;
  double environment_photons = 0.0;
};

struct SingleModeChannel {
  std::variant<PureLoss, ThermalNoise, Amplifier> kind;
  double signal_photons = 0.0;  // N_S, mean photons per use
};

/// Capacity in bits per channel use with Gaussian coherent-state encoding.
///
/// Holevo uses the thermal-entropy closed forms. The coherent receivers use the
/// Gaussian-channel forms with power gain G and injected noise S:
///   homodyne   1/2 log2(1 + 4 G N_S / (2 S + 1))
///   heterodyne log2(1 + G N_S / (S + 1))
/// where S = (1-eta) N_env for attenuators and (kappa-1)(N_env+1) for amplifiers.
double single_mode_capacity(const SingleModeChannel& channel, DetectionScheme scheme);

/// A finite block of Fourier modes w_k = 2 pi k / T_s, k = -K..K, with guard
/// band dT_s between symbols. Gains and noise are stored in k order.
struct DiscreteModeProblem {
  double symbol_duration = 0.0;  // T_s, seconds
  double guard_band = 0.0;       // dT_s, seconds
  std::vector<double> gains;     // |H(w_k)|^2
  std::vector<double> noise;     // S_N(w_k)
  double flux = 0.0;             // photons/s

  int max_mode_index() const { return static_cast<int>(gains.size() / 2); }
  /// Throws InvalidParameter on malformed data or a truncation with edge
  /// gain >= 1e-12 of the peak.
  void validate() const;
};

/// Samples a channel on the mode grid, taking K just large enough that the
/// edge gain falls below 1e-12 of the peak.
DiscreteModeProblem discretize(const ChannelModel& channel, double symbol_duration, double guard_band,
                               double flux);

/// Optimal information rate (bits/s) of the discretised channel under
/// sum_k n_k / (T_s + dT_s) <= flux, via per-mode water-filling.
double discrete_capacity(const DiscreteModeProblem& problem, DetectionScheme scheme);

}  // namespace lticap::oracle
