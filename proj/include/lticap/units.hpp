#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace lticap {

/// Ordinary frequency (cycles per second).
struct Hertz {
  double value = 0.0;
};

/// Angular frequency. Every detuning inside the library is carried in rad/s.
struct RadiansPerSecond {
  double value = 0.0;
};

constexpr RadiansPerSecond to_angular(Hertz f) { return {2.0 * std::numbers::pi * f.value}; }
constexpr Hertz to_hertz(RadiansPerSecond w) { return {w.value / (2.0 * std::numbers::pi)}; }

/// Thrown when a caller passes a value outside an operation's domain.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace lticap
