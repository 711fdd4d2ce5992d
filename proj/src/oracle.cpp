#include "lticap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lticap/entropy.hpp"

namespace lticap::oracle {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct GainAndNoise {
  double gain;
  double noise;
};

GainAndNoise gain_and_noise(const SingleModeChannel& ch) {
  auto check_env = [](double n) {
    if (!std::isfinite(n) || n < 0.0) throw InvalidParameter("environment photon number must be >= 0");
  };
  auto check_eta = [](double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw InvalidParameter("transmissivity must lie in (0, 1]");
  };
  return std::visit(Overloaded{
                        [&](const PureLoss& c) {
                          check_eta(c.transmissivity);
                          return GainAndNoise{c.transmissivity, 0.0};
                        },
                        [&](const ThermalNoise& c) {
                          check_eta(c.transmissivity);
                          check_env(c.environment_photons);
                          return GainAndNoise{c.transmissivity, (1.0 - c.transmissivity) * c.environment_photons};
                        },
                        [&](const Amplifier& c) {
                          if (!(c.gain > 1.0) || !std::isfinite(c.gain)) {
                            throw InvalidParameter("amplifier gain must be finite and > 1");
                          }
                          check_env(c.environment_photons);
                          return GainAndNoise{c.gain, (c.gain - 1.0) * (c.environment_photons + 1.0)};
                        },
                    },
                    ch.kind);
}

// Per-mode allocation and rate, written independently of the continuum solver.
double mode_photons(double gain, double noise, DetectionScheme scheme, double beta) {
  if (gain <= 1e-30) return 0.0;
  double n = 0.0;
  if (scheme == DetectionScheme::Holevo) {
    n = (1.0 / std::expm1(beta / gain) - noise) / gain;
  } else if (scheme == DetectionScheme::Homodyne) {
    n = beta / 2.0 - (2.0 * noise + 1.0) / (4.0 * gain);
  } else {
    n = beta - (noise + 1.0) / gain;
  }
  return std::max(n, 0.0);
}

double mode_bits(double gain, double noise, DetectionScheme scheme, double n) {
  if (n <= 0.0) return 0.0;
  if (scheme == DetectionScheme::Holevo) {
    return thermal_entropy_bits(gain * n + noise) - thermal_entropy_bits(noise);
  }
  if (scheme == DetectionScheme::Homodyne) {
    return 0.5 * std::log2(1.0 + 4.0 * gain * n / (2.0 * noise + 1.0));
  }
  return std::log2(1.0 + gain * n / (noise + 1.0));
}

}  // namespace

double single_mode_capacity(const SingleModeChannel& ch, DetectionScheme scheme) {
  if (!std::isfinite(ch.signal_photons) || ch.signal_photons < 0.0) {
    throw InvalidParameter("signal photon number must be finite and >= 0");
  }
  const auto [gain, noise] = gain_and_noise(ch);
  const double ns = ch.signal_photons;
  switch (scheme) {
    case DetectionScheme::Holevo:
      return thermal_entropy_bits(gain * ns + noise) - thermal_entropy_bits(noise);
    case DetectionScheme::Homodyne:
      return 0.5 * std::log2(1.0 + 4.0 * gain * ns / (2.0 * noise + 1.0));
    case DetectionScheme::Heterodyne:
      return std::log2(1.0 + gain * ns / (noise + 1.0));
  }
  return 0.0;
}

void DiscreteModeProblem::validate() const {
  if (!(symbol_duration > 0.0) || !std::isfinite(symbol_duration)) {
    throw InvalidParameter("symbol duration must be finite and positive");
  }
  if (!(guard_band > 0.0) || !std::isfinite(guard_band)) {
    throw InvalidParameter("guard band must be finite and positive");
  }
  if (gains.size() != noise.size() || gains.size() % 2 != 1) {
    throw InvalidParameter("mode data must cover k = -K..K for gains and noise alike");
  }
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (!(gains[i] >= 0.0) || !(noise[i] >= 0.0) || !std::isfinite(gains[i]) || !std::isfinite(noise[i])) {
      throw InvalidParameter("per-mode gains and noise must be finite and non-negative");
    }
  }
  if (!std::isfinite(flux) || flux < 0.0) throw InvalidParameter("flux budget must be finite and >= 0");
  const double peak = *std::max_element(gains.begin(), gains.end());
  if (!(peak > 0.0)) throw InvalidParameter("no mode transmits any signal");
  if (gains.size() > 1 && std::max(gains.front(), gains.back()) >= 1e-12 * peak) {
    throw InvalidParameter("mode range truncated while the gain is still above 1e-12 of its peak");
  }
}

DiscreteModeProblem discretize(const ChannelModel& channel, double symbol_duration, double guard_band,
                               double flux) {
  if (!(symbol_duration > 0.0)) throw InvalidParameter("symbol duration must be positive");
  const double spacing = 2.0 * std::numbers::pi / symbol_duration;
  const double peak = channel.squared_magnitude(0.0);
  long k_max = static_cast<long>(std::ceil(channel.support_hint() / spacing));
  while (channel.squared_magnitude(spacing * static_cast<double>(k_max)) >= 1e-12 * peak) ++k_max;
  if (k_max > 50'000'000) throw InvalidParameter("discretisation needs too many modes");

  DiscreteModeProblem p;
  p.symbol_duration = symbol_duration;
  p.guard_band = guard_band;
  p.flux = flux;
  p.gains.reserve(static_cast<std::size_t>(2 * k_max + 1));
  p.noise.reserve(static_cast<std::size_t>(2 * k_max + 1));
  for (long k = -k_max; k <= k_max; ++k) {
    const auto pt = channel.at(spacing * static_cast<double>(k));
    p.gains.push_back(pt.squared_magnitude);
    p.noise.push_back(pt.noise);
  }
  return p;
}

double discrete_capacity(const DiscreteModeProblem& problem, DetectionScheme scheme) {
  problem.validate();
  if (problem.flux == 0.0) return 0.0;
  const double frame = problem.symbol_duration + problem.guard_band;
  const double budget = problem.flux * frame;  // photons per symbol

  auto photons = [&](double beta) {
    double total = 0.0;
    for (std::size_t k = 0; k < problem.gains.size(); ++k) {
      total += mode_photons(problem.gains[k], problem.noise[k], scheme, beta);
    }
    return total;
  };

  // Holevo: photons fall as beta grows. Coherent receivers: photons rise.
  const bool falls = scheme == DetectionScheme::Holevo;
  const bool over_at_one = photons(1.0) > budget;
  const bool go_up = over_at_one == falls;
  double prev = 1.0, cur = 1.0;
  for (int i = 0;; ++i) {
    if (i == 2000) throw std::runtime_error("discrete oracle: multiplier bracket not found");
    prev = cur;
    cur = go_up ? cur * 2.0 : cur / 2.0;
    if ((photons(cur) > budget) != over_at_one) break;
  }
  double lo = std::min(prev, cur), hi = std::max(prev, cur);
  const bool lo_over = photons(lo) > budget;
  for (int i = 0; i < 300; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (!(mid > lo && mid < hi)) break;
    if ((photons(mid) > budget) == lo_over) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double beta = std::sqrt(lo * hi);

  double bits = 0.0;
  for (std::size_t k = 0; k < problem.gains.size(); ++k) {
    const double n = mode_photons(problem.gains[k], problem.noise[k], scheme, beta);
    bits += mode_bits(problem.gains[k], problem.noise[k], scheme, n);
  }
  return bits / frame;
}

}  // namespace lticap::oracle
