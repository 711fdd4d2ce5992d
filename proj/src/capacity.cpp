#include "lticap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include <fmt/format.h>

#include "lticap/entropy.hpp"
#include "lticap/quadrature.hpp"

namespace lticap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kScanIntervals = 4096;

// The support of every allocation is a level set of a beta-independent
// threshold function tau(w):
//   Holevo:     n > 0  <=>  |H|^2 ln(1 + 1/S_N) > beta
//   homodyne:   n > 0  <=>  (2 S_N + 1) / (2 |H|^2) < beta
//   heterodyne: n > 0  <=>  (S_N + 1) / |H|^2 < beta
double threshold(const SpectralPoint& p, DetectionScheme scheme) {
  const double g2 = p.squared_magnitude;
  if (g2 <= kGainFloor) return scheme == DetectionScheme::Holevo ? 0.0 : kInf;
  switch (scheme) {
    case DetectionScheme::Holevo:
      return p.noise <= 0.0 ? kInf : g2 * std::log1p(1.0 / p.noise);
    case DetectionScheme::Homodyne:
      return (2.0 * p.noise + 1.0) / (2.0 * g2);
    case DetectionScheme::Heterodyne:
      return (p.noise + 1.0) / g2;
  }
  return kInf;
}

bool inside(double tau, DetectionScheme scheme, double beta) {
  return scheme == DetectionScheme::Holevo ? tau > beta : tau < beta;
}

/// Partitions [0, window] into pieces on which tau is monotone, so that the
/// support for any beta follows from the piece endpoints plus one bisection
/// per crossing.
class SupportScanner {
 public:
  SupportScanner(const ChannelModel& channel, DetectionScheme scheme, double window)
      : channel_(channel), scheme_(scheme) {
    std::vector<std::pair<double, bool>> knots;  // (detuning, is_breakpoint)
    knots.reserve(kScanIntervals + 1 + channel.breakpoints().size());
    for (int i = 0; i <= kScanIntervals; ++i) knots.emplace_back(window * i / kScanIntervals, false);
    for (double w : channel.breakpoints()) {
      if (w < window) {
        knots.emplace_back(w, true);
        breakpoints_.push_back(w);
      }
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end(),
                            [](const auto& a, const auto& b) { return a.first == b.first; }),
                knots.end());

    std::vector<double> taus(knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i) taus[i] = tau(knots[i].first);

    std::vector<double> extra;
    for (std::size_t i = 1; i + 1 < knots.size(); ++i) {
      if (knots[i].second || !std::isfinite(taus[i])) continue;
      const bool is_max = taus[i] > taus[i - 1] && taus[i] > taus[i + 1];
      const bool is_min = taus[i] < taus[i - 1] && taus[i] < taus[i + 1];
      if (is_max || is_min) extra.push_back(refine_extremum(knots[i - 1].first, knots[i + 1].first, is_max));
    }

    knots_.reserve(knots.size() + extra.size());
    for (const auto& k : knots) knots_.push_back(k.first);
    knots_.insert(knots_.end(), extra.begin(), extra.end());
    std::sort(knots_.begin(), knots_.end());
    knots_.erase(std::unique(knots_.begin(), knots_.end()), knots_.end());
    taus_.resize(knots_.size());
    for (std::size_t i = 0; i < knots_.size(); ++i) taus_[i] = tau(knots_[i]);
  }

  std::vector<Interval> support(double beta) const {
    std::vector<Interval> out;
    auto push = [&](double lo, double hi) {
      if (!(hi > lo)) return;
      if (!out.empty() && out.back().hi >= lo) {
        out.back().hi = std::max(out.back().hi, hi);
      } else {
        out.push_back({lo, hi});
      }
    };
    for (std::size_t j = 0; j + 1 < knots_.size(); ++j) {
      const double a = knots_[j], b = knots_[j + 1];
      const bool in_a = inside(taus_[j], scheme_, beta);
      const bool in_b = inside(taus_[j + 1], scheme_, beta);
      if (in_a && in_b) {
        push(a, b);
      } else if (in_a) {
        push(a, crossing(a, b, true, beta));
      } else if (in_b) {
        push(crossing(a, b, false, beta), b);
      }
    }
    return out;
  }

  const std::vector<double>& breakpoints() const { return breakpoints_; }

 private:
  double tau(double omega) const { return threshold(channel_.at(omega), scheme_); }

  double crossing(double lo, double hi, bool lo_inside, double beta) const {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) break;
      if (inside(tau(mid), scheme_, beta) == lo_inside) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  double refine_extremum(double lo, double hi, bool maximize) const {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto score = [&](double w) { return maximize ? tau(w) : -tau(w); };
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = score(x1), f2 = score(x2);
    for (int it = 0; it < 120 && hi - lo > 4.0 * kEps * hi; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = score(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = score(x1);
      }
    }
    return 0.5 * (lo + hi);
  }

  const ChannelModel& channel_;
  DetectionScheme scheme_;
  std::vector<double> breakpoints_;
  std::vector<double> knots_;
  std::vector<double> taus_;
};

double capacity_density(const SpectralPoint& p, DetectionScheme scheme, double beta) {
  const double n = allocation_at(p, scheme, beta);
  if (n <= 0.0) return 0.0;
  const double g2 = p.squared_magnitude;
  switch (scheme) {
    case DetectionScheme::Holevo:
      return thermal_entropy_bits(g2 * n + p.noise) - thermal_entropy_bits(p.noise);
    case DetectionScheme::Homodyne:
      return 0.5 * std::log1p(n * g2 / measurement_noise_spectrum(p.noise, scheme)) / std::numbers::ln2;
    case DetectionScheme::Heterodyne:
      return std::log1p(n * g2 / (2.0 * measurement_noise_spectrum(p.noise, scheme))) / std::numbers::ln2;
  }
  return 0.0;
}

class Waterfiller {
 public:
  Waterfiller(const ChannelModel& channel, DetectionScheme scheme, const SolverConfig& config, double window)
      : channel_(channel), scheme_(scheme), config_(config), scanner_(channel, scheme, window) {}

  std::vector<Interval> support(double beta) const { return scanner_.support(beta); }

  /// Photons/s: (1/pi) * integral over w >= 0, using evenness.
  double flux(const std::vector<Interval>& support, double beta) const {
    const double tol = std::min(config_.quadrature_tolerance_rel, 1e-2 * config_.flux_tolerance_rel);
    auto f = [&](double w) { return allocation_at(channel_.at(w), scheme_, beta); };
    return integrate(f, support, tol) / std::numbers::pi;
  }

  double capacity(const std::vector<Interval>& support, double beta) const {
    auto f = [&](double w) { return capacity_density(channel_.at(w), scheme_, beta); };
    return integrate(f, support, config_.quadrature_tolerance_rel) / std::numbers::pi;
  }

 private:
  template <class F>
  double integrate(F& f, const std::vector<Interval>& support, double tol) const {
    std::vector<std::pair<double, double>> panels;
    const auto& bps = scanner_.breakpoints();
    for (const auto& iv : support) {
      double lo = iv.lo;
      for (auto it = std::upper_bound(bps.begin(), bps.end(), iv.lo); it != bps.end() && *it < iv.hi; ++it) {
        panels.emplace_back(lo, *it);
        lo = *it;
      }
      panels.emplace_back(lo, iv.hi);
    }
    return quad::integrate_panels(f, std::span<const std::pair<double, double>>(panels), tol).value;
  }

  const ChannelModel& channel_;
  DetectionScheme scheme_;
  const SolverConfig& config_;
  SupportScanner scanner_;
};

WaterfillSolution empty_solution(const ChannelModel& channel, DetectionScheme scheme, double flux) {
  WaterfillSolution s{.scheme = scheme,
                      .lagrange_multiplier = scheme == DetectionScheme::Holevo ? kInf : 0.0,
                      .support = {},
                      .requested_flux = flux,
                      .achieved_flux = 0.0,
                      .capacity = 0.0,
                      .degenerate = true,
                      .channel = channel};
  return s;
}

}  // namespace

std::string_view scheme_name(DetectionScheme scheme) {
  switch (scheme) {
    case DetectionScheme::Holevo:
      return "holevo";
    case DetectionScheme::Homodyne:
      return "homodyne";
    case DetectionScheme::Heterodyne:
      return "heterodyne";
  }
  return "unknown";
}

std::optional<DetectionScheme> parse_scheme(std::string_view name) {
  for (auto s : {DetectionScheme::Holevo, DetectionScheme::Homodyne, DetectionScheme::Heterodyne}) {
    if (scheme_name(s) == name) return s;
  }
  return std::nullopt;
}

void SolverConfig::validate() const {
  auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!in_unit(flux_tolerance_rel)) throw InvalidParameter("flux_tolerance_rel must lie in (0, 1)");
  if (!in_unit(quadrature_tolerance_rel)) throw InvalidParameter("quadrature_tolerance_rel must lie in (0, 1)");
  if (max_bisection_iters < 1) throw InvalidParameter("max_bisection_iters must be at least 1");
  if (!(bracket_growth_factor > 1.0) || !std::isfinite(bracket_growth_factor)) {
    throw InvalidParameter("bracket_growth_factor must be finite and greater than 1");
  }
  if (frequency_window_override &&
      (!std::isfinite(*frequency_window_override) || *frequency_window_override <= 0.0)) {
    throw InvalidParameter("frequency window must be finite and positive");
  }
}

double WaterfillSolution::allocation(double omega) const {
  if (degenerate) return 0.0;
  return allocation_at(channel.at(omega), scheme, lagrange_multiplier);
}

double WaterfillSolution::support_bandwidth_hz() const {
  double total = 0.0;
  for (const auto& iv : support) total += iv.hi - iv.lo;
  return total / std::numbers::pi;
}

double measurement_noise_spectrum(double noise, DetectionScheme scheme) {
  if (!(noise >= 0.0)) throw InvalidParameter("noise spectrum must be non-negative");
  switch (scheme) {
    case DetectionScheme::Homodyne:
      return (2.0 * noise + 1.0) / 4.0;
    case DetectionScheme::Heterodyne:
      return (noise + 1.0) / 2.0;
    case DetectionScheme::Holevo:
      break;
  }
  throw InvalidParameter("the Holevo scheme has no classical measurement noise");
}

double allocation_at(const SpectralPoint& p, DetectionScheme scheme, double beta) {
  const double g2 = p.squared_magnitude;
  if (g2 <= kGainFloor) return 0.0;
  double n = 0.0;
  switch (scheme) {
    case DetectionScheme::Holevo: {
      // expm1 overflows to +inf for large arguments, which correctly gives zero occupancy
      const double occupancy = 1.0 / std::expm1(beta / g2);
      n = (occupancy - p.noise) / g2;
      break;
    }
    case DetectionScheme::Homodyne:
      n = 0.5 * beta - measurement_noise_spectrum(p.noise, scheme) / g2;
      break;
    case DetectionScheme::Heterodyne:
      n = beta - 2.0 * measurement_noise_spectrum(p.noise, scheme) / g2;
      break;
  }
  return n > 0.0 ? n : 0.0;
}

double hsw_allocation(const ChannelModel& channel, double beta, double omega) {
  if (!(beta > 0.0)) throw InvalidParameter("Lagrange multiplier must be positive");
  return allocation_at(channel.at(omega), DetectionScheme::Holevo, beta);
}

double classical_allocation(const ChannelModel& channel, DetectionScheme scheme, double beta, double omega) {
  if (scheme == DetectionScheme::Holevo) {
    throw InvalidParameter("classical allocation requires homodyne or heterodyne detection");
  }
  if (!(beta > 0.0)) throw InvalidParameter("Lagrange multiplier must be positive");
  return allocation_at(channel.at(omega), scheme, beta);
}

WaterfillSolution solve_flux_constraint(const ChannelModel& channel, DetectionScheme scheme, double flux,
                                        const SolverConfig& config) {
  config.validate();
  if (!std::isfinite(flux) || flux < 0.0) throw InvalidParameter("photon flux must be finite and non-negative");
  if (flux == 0.0) return empty_solution(channel, scheme, flux);

  const double window = config.frequency_window_override.value_or(channel.support_hint());
  if (!std::isfinite(window) || window <= 0.0 || window > 1e300) {
    throw InvalidParameter("channel has no finite frequency window; set frequency_window_override");
  }
  const Waterfiller filler(channel, scheme, config, window);

  struct Trial {
    double beta;
    std::vector<Interval> support;
    double flux;
  };
  auto trial = [&](double beta) {
    auto sup = filler.support(beta);
    const double f = filler.flux(sup, beta);
    return Trial{beta, std::move(sup), f};
  };
  auto converged = [&](const Trial& t) { return std::abs(t.flux - flux) <= config.flux_tolerance_rel * flux; };

  auto finish = [&](Trial t) {
    WaterfillSolution s{.scheme = scheme,
                        .lagrange_multiplier = t.beta,
                        .support = std::move(t.support),
                        .requested_flux = flux,
                        .achieved_flux = t.flux,
                        .capacity = 0.0,
                        .degenerate = false,
                        .channel = channel};
    if (s.support.empty() || s.achieved_flux <= 0.0) {
      s.degenerate = true;
      s.achieved_flux = 0.0;
      return s;
    }
    s.capacity = std::max(0.0, filler.capacity(s.support, s.lagrange_multiplier));
    return s;
  };

  // Holevo flux falls with beta; the coherent-receiver fluxes rise with it.
  const bool flux_falls = scheme == DetectionScheme::Holevo;
  Trial t = trial(1.0);
  if (converged(t)) return finish(std::move(t));
  const bool grow = (t.flux > flux) == flux_falls;
  Trial other = t;
  for (int it = 0;; ++it) {
    if (it >= config.max_bisection_iters) {
      const double lo = std::min(t.beta, other.beta), hi = std::max(t.beta, other.beta);
      throw SolverFailure(fmt::format("no multiplier bracket for {} at flux {:.6g} within {} steps; last "
                                      "bracket [{:.6g}, {:.6g}]",
                                      scheme_name(scheme), flux, config.max_bisection_iters, lo, hi),
                          lo, hi);
    }
    t = std::move(other);
    other = trial(grow ? t.beta * config.bracket_growth_factor : t.beta / config.bracket_growth_factor);
    if (converged(other)) return finish(std::move(other));
    if ((other.flux > flux) != (t.flux > flux)) break;
  }

  // t and other straddle the target; bisect geometrically.
  Trial lo = std::move(t);
  Trial hi = std::move(other);
  if (hi.beta < lo.beta) std::swap(lo, hi);
  const bool lo_above = lo.flux > flux;
  for (int it = 0; it < config.max_bisection_iters; ++it) {
    const double mid_beta = std::sqrt(lo.beta) * std::sqrt(hi.beta);
    if (!(mid_beta > lo.beta && mid_beta < hi.beta)) break;
    Trial mid = trial(mid_beta);
    if (converged(mid)) return finish(std::move(mid));
    if ((mid.flux > flux) == lo_above) {
      lo = std::move(mid);
    } else {
      hi = std::move(mid);
    }
  }
  // Budgets below the resolvable allocation collapse onto an empty support.
  Trial& low_side = lo_above ? hi : lo;
  if (low_side.flux == 0.0) return empty_solution(channel, scheme, flux);
  throw SolverFailure(fmt::format("bisection for {} at flux {:.6g} stalled with flux in [{:.10g}, {:.10g}]",
                                  scheme_name(scheme), flux, std::min(lo.flux, hi.flux),
                                  std::max(lo.flux, hi.flux)),
                      lo.beta, hi.beta);
}

WaterfillSolution capacity(const ChannelModel& channel, DetectionScheme scheme, double flux,
                           const SolverConfig& config) {
  return solve_flux_constraint(channel, scheme, flux, config);
}

}  // namespace lticap
