#include "lticap/physics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace lticap {

PhysicalEnvironment::PhysicalEnvironment(RadiansPerSecond carrier, double temperature_k)
    : omega0_(carrier.value), temperature_k_(temperature_k) {
  if (!std::isfinite(omega0_) || omega0_ <= 0.0) {
    throw InvalidParameter("carrier angular frequency must be finite and positive");
  }
  if (!std::isfinite(temperature_k_) || temperature_k_ < 0.0) {
    throw InvalidParameter("temperature must be finite and non-negative");
  }
}

PhysicalEnvironment PhysicalEnvironment::from_wavelength(double wavelength_m, double temperature_k) {
  if (!std::isfinite(wavelength_m) || wavelength_m <= 0.0) {
    throw InvalidParameter("wavelength must be finite and positive");
  }
  return {RadiansPerSecond{2.0 * std::numbers::pi * constants::speed_of_light / wavelength_m},
          temperature_k};
}

PhysicalEnvironment PhysicalEnvironment::from_carrier_hz(double carrier_hz, double temperature_k) {
  return {to_angular(Hertz{carrier_hz}), temperature_k};
}

double PhysicalEnvironment::reduced_photon_energy() const {
  if (temperature_k_ == 0.0) return std::numeric_limits<double>::infinity();
  return constants::hbar * omega0_ / (constants::boltzmann * temperature_k_);
}

double thermal_occupancy(const PhysicalEnvironment& env) {
  if (env.temperature() == 0.0) return 0.0;
  const double x = env.reduced_photon_energy();
  // exp(x) overflows near 709; beyond 700 the leading term is exact to double precision.
  if (x > 700.0) return std::exp(-x);
  return 1.0 / std::expm1(x);
}

}  // namespace lticap
