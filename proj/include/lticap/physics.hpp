#pragma once

#include "lticap/units.hpp"

namespace lticap {

/// CODATA 2018 exact/recommended values, SI units.
namespace constants {
inline constexpr double planck = 6.62607015e-34;            // J s
inline constexpr double hbar = 1.0545718176461565e-34;      // J s, planck / 2pi
inline constexpr double boltzmann = 1.380649e-23;           // J / K
inline constexpr double speed_of_light = 299792458.0;       // m / s
}  // namespace constants

/// Optical carrier and reservoir temperature shared by every stage of a link.
class PhysicalEnvironment {
 public:
  /// Throws InvalidParameter unless omega0 > 0 and temperature >= 0 (both finite).
  PhysicalEnvironment(RadiansPerSecond carrier, double temperature_k);

  static PhysicalEnvironment from_wavelength(double wavelength_m, double temperature_k);
  static PhysicalEnvironment from_carrier_hz(double carrier_hz, double temperature_k);

  double carrier_angular_frequency() const { return omega0_; }
  double temperature() const { return temperature_k_; }

  /// hbar omega0 / (k_B T); +inf at T = 0.
  double reduced_photon_energy() const;

 private:
  double omega0_;
  double temperature_k_;
};

/// Mean thermal photon number 1/(exp(hbar w0 / k_B T) - 1) at the carrier.
/// Exactly 0 at T = 0.
double thermal_occupancy(const PhysicalEnvironment& env);

}  // namespace lticap
