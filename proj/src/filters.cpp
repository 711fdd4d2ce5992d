#include "lticap/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace lticap {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0) throw InvalidParameter(std::string(what) + " must be finite and positive");
}

double butterworth_value(const Butterworth4& b, double omega) {
  const double r = omega / b.cutoff;
  const double r2 = r * r;
  const double r4 = r2 * r2;
  const double den = 1.0 + r4 * r4;
  return b.law == ButterworthLaw::Reciprocal ? 1.0 / den : 1.0 / std::sqrt(den);
}

double tabulated_value(const TabulatedResponse& t, double omega) {
  const double w = std::abs(omega);
  if (w < t.detuning.front() || w > t.detuning.back()) return 0.0;
  auto hi = std::upper_bound(t.detuning.begin(), t.detuning.end(), w);
  if (hi == t.detuning.end()) return t.magnitude.back();
  const auto i = static_cast<std::size_t>(hi - t.detuning.begin());
  const double x0 = t.detuning[i - 1], x1 = t.detuning[i];
  const double f = (w - x0) / (x1 - x0);
  return t.magnitude[i - 1] + f * (t.magnitude[i] - t.magnitude[i - 1]);
}

}  // namespace

FilterShape FilterShape::butterworth4(RadiansPerSecond cutoff, ButterworthLaw law) {
  require_positive(cutoff.value, "Butterworth cutoff");
  return FilterShape(Butterworth4{cutoff.value, law});
}

FilterShape FilterShape::butterworth4(Hertz cutoff, ButterworthLaw law) {
  return butterworth4(to_angular(cutoff), law);
}

FilterShape FilterShape::flat(RadiansPerSecond bandwidth) {
  require_positive(bandwidth.value, "flat bandwidth");
  return FilterShape(FlatBand{bandwidth.value});
}

FilterShape FilterShape::flat(Hertz bandwidth) { return flat(to_angular(bandwidth)); }

FilterShape FilterShape::tabulated(std::vector<double> detuning_rad, std::vector<double> magnitude) {
  if (detuning_rad.size() != magnitude.size()) {
    throw InvalidParameter("tabulated response: detuning and magnitude lengths differ");
  }
  if (detuning_rad.size() < 2) throw InvalidParameter("tabulated response needs at least two nodes");
  for (std::size_t i = 0; i < detuning_rad.size(); ++i) {
    if (!std::isfinite(detuning_rad[i]) || !std::isfinite(magnitude[i])) {
      throw InvalidParameter("tabulated response values must be finite");
    }
    if (magnitude[i] < 0.0) throw InvalidParameter("tabulated magnitudes must be non-negative");
    if (i > 0 && !(detuning_rad[i] > detuning_rad[i - 1])) {
      throw InvalidParameter("tabulated detuning grid must be strictly increasing");
    }
  }
  if (detuning_rad.front() < 0.0) {
    throw InvalidParameter("tabulated detunings are |w| values and must be non-negative");
  }
  const double peak = *std::max_element(magnitude.begin(), magnitude.end());
  if (peak <= 0.0) throw InvalidParameter("tabulated response is identically zero");
  for (double& m : magnitude) m /= peak;
  return FilterShape(TabulatedResponse{std::move(detuning_rad), std::move(magnitude)});
}

double FilterShape::normalized_magnitude(double omega) const {
  return std::visit(Overloaded{
                        [&](const Butterworth4& b) { return butterworth_value(b, omega); },
                        [&](const FlatBand& f) { return std::abs(omega) <= 0.5 * f.bandwidth ? 1.0 : 0.0; },
                        [&](const TabulatedResponse& t) { return tabulated_value(t, omega); },
                    },
                    form_);
}

double FilterShape::support_hint() const {
  return std::visit(Overloaded{
                        [](const Butterworth4& b) {
                          // |H|^2 ratio is (1+r^8)^-2 or (1+r^8)^-1
                          const double target = b.law == ButterworthLaw::Reciprocal ? 1e6 : 1e12;
                          return b.cutoff * std::pow(target - 1.0, 0.125);
                        },
                        [](const FlatBand& f) { return 0.5 * f.bandwidth; },
                        [](const TabulatedResponse& t) { return t.detuning.back(); },
                    },
                    form_);
}

std::vector<double> FilterShape::kinks() const {
  return std::visit(Overloaded{
                        [](const Butterworth4&) { return std::vector<double>{}; },
                        [](const FlatBand& f) { return std::vector<double>{0.5 * f.bandwidth}; },
                        [](const TabulatedResponse& t) { return t.detuning; },
                    },
                    form_);
}

std::vector<double> FilterShape::unity_crossings(double peak_magnitude) const {
  std::vector<double> out;
  std::visit(Overloaded{
                 [&](const Butterworth4& b) {
                   if (peak_magnitude <= 1.0) return;
                   const double excess = b.law == ButterworthLaw::Reciprocal
                                             ? peak_magnitude - 1.0
                                             : peak_magnitude * peak_magnitude - 1.0;
                   out.push_back(b.cutoff * std::pow(excess, 0.125));
                 },
                 [&](const FlatBand&) {},
                 [&](const TabulatedResponse& t) {
                   for (std::size_t i = 1; i < t.detuning.size(); ++i) {
                     const double a = peak_magnitude * t.magnitude[i - 1] - 1.0;
                     const double c = peak_magnitude * t.magnitude[i] - 1.0;
                     if (a * c < 0.0) {
                       const double f = a / (a - c);
                       out.push_back(t.detuning[i - 1] + f * (t.detuning[i] - t.detuning[i - 1]));
                     }
                   }
                 },
             },
             form_);
  return out;
}

double FilterStage::peak_magnitude() const { return std::pow(10.0, peak_gain_db / 20.0); }

double stage_magnitude(const FilterStage& stage, double omega) {
  return stage.peak_magnitude() * stage.shape.normalized_magnitude(omega);
}

namespace {

double noise_from_gain(double squared_magnitude, double occupancy) {
  if (squared_magnitude <= 1.0) return (1.0 - squared_magnitude) * occupancy;
  return (squared_magnitude - 1.0) * (occupancy + 1.0);
}

struct StageData {
  FilterShape shape;
  double peak_squared;
};

}  // namespace

double stage_noise_spectrum(const FilterStage& stage, const PhysicalEnvironment& env, double omega) {
  const double m = stage_magnitude(stage, omega);
  return noise_from_gain(m * m, thermal_occupancy(env));
}

ChannelModel::ChannelModel(Evaluator eval, double support_hint, std::vector<double> breakpoints)
    : eval_(std::move(eval)), support_hint_(support_hint), breakpoints_(std::move(breakpoints)) {
  if (!eval_) throw InvalidParameter("channel model needs an evaluator");
  require_positive(support_hint_, "channel support hint");
  std::erase_if(breakpoints_, [](double w) { return !(w > 0.0 && std::isfinite(w)); });
  std::sort(breakpoints_.begin(), breakpoints_.end());
  breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
}

ChannelModel cascade(std::span<const FilterStage> stages, const PhysicalEnvironment& env) {
  if (stages.empty()) throw InvalidParameter("cascade needs at least one stage");
  const ChannelModel identity([](double) { return SpectralPoint{1.0, 0.0}; },
                              std::numeric_limits<double>::max());
  return cascade(identity, stages, env);
}

ChannelModel cascade(const ChannelModel& upstream, std::span<const FilterStage> stages,
                     const PhysicalEnvironment& env) {
  const double occupancy = thermal_occupancy(env);
  auto data = std::make_shared<std::vector<StageData>>();
  double hint = upstream.support_hint();
  std::vector<double> breakpoints = upstream.breakpoints();
  for (const auto& s : stages) {
    const double peak = s.peak_magnitude();
    if (!std::isfinite(peak) || peak <= 0.0) throw InvalidParameter("stage peak gain out of range");
    data->push_back({s.shape, peak * peak});
    hint = std::min(hint, s.shape.support_hint());
    for (double w : s.shape.kinks()) breakpoints.push_back(w);
    for (double w : s.shape.unity_crossings(peak)) breakpoints.push_back(w);
  }
  auto eval = [upstream, data, occupancy](double omega) {
    SpectralPoint p = upstream.at(omega);
    for (const auto& s : *data) {
      const double h = s.shape.normalized_magnitude(omega);
      const double gain = s.peak_squared * h * h;
      p.noise = gain * p.noise + noise_from_gain(gain, occupancy);
      p.squared_magnitude *= gain;
    }
    return p;
  };
  return ChannelModel(std::move(eval), hint, std::move(breakpoints));
}

}  // namespace lticap
