#include "lticap/entropy.hpp"

#include <cmath>
#include <numbers>

#include "lticap/units.hpp"

namespace lticap {

double thermal_entropy_bits(double x) {
  if (!std::isfinite(x) || x < 0.0) {
    throw InvalidParameter("thermal entropy needs a finite, non-negative photon number");
  }
  if (x == 0.0) return 0.0;
  double nats;
  if (x < 1.0) {
    // (1+x) ln(1+x) + x ln(1/x); both terms >= 0
    nats = (1.0 + x) * std::log1p(x) - x * std::log(x);
  } else {
    // ln(1+x) + x ln(1 + 1/x); both terms >= 0
    nats = std::log1p(x) + x * std::log1p(1.0 / x);
  }
  return nats / std::numbers::ln2;
}

}  // namespace lticap
