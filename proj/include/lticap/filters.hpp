#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "lticap/physics.hpp"
#include "lticap/units.hpp"

namespace lticap {

/// Magnitude law used for the fourth-order Butterworth response.
enum class ButterworthLaw {
  /// |H| = 1 / (1 + (w/wc)^8)
  Reciprocal,
  /// |H| = 1 / sqrt(1 + (w/wc)^8), the textbook power response
  Standard,
};

struct Butterworth4 {
  double cutoff = 0.0;  // rad/s
  ButterworthLaw law = ButterworthLaw::Reciprocal;
};

/// Brick-wall passband of total width `bandwidth` centred on zero detuning.
struct FlatBand {
  double bandwidth = 0.0;  // rad/s
};

/// Piecewise-linear magnitude over |w|. Nodes are non-negative detunings in rad/s;
/// the response is zero outside [front, back].
struct TabulatedResponse {
  std::vector<double> detuning;
  std::vector<double> magnitude;  // normalised so that max == 1
};

/// A normalised magnitude response: peak value 1, values in [0, 1].
class FilterShape {
 public:
  static FilterShape butterworth4(RadiansPerSecond cutoff, ButterworthLaw law = ButterworthLaw::Reciprocal);
  static FilterShape butterworth4(Hertz cutoff, ButterworthLaw law = ButterworthLaw::Reciprocal);
  static FilterShape flat(RadiansPerSecond bandwidth);
  static FilterShape flat(Hertz bandwidth);
  /// Magnitudes are rescaled by their maximum, which must be positive.
  static FilterShape tabulated(std::vector<double> detuning_rad, std::vector<double> magnitude);

  double normalized_magnitude(double omega) const;

  /// Smallest detuning beyond which |H|^2 / |H(0)|^2 < 1e-12 (band edge for flat,
  /// last node for tabulated).
  double support_hint() const;

  /// Non-negative detunings where the response has a kink or a jump.
  std::vector<double> kinks() const;

  /// Non-negative detunings where peak_magnitude * normalized_magnitude crosses 1.
  std::vector<double> unity_crossings(double peak_magnitude) const;

  const std::variant<Butterworth4, FlatBand, TabulatedResponse>& form() const { return form_; }

 private:
  explicit FilterShape(std::variant<Butterworth4, FlatBand, TabulatedResponse> f) : form_(std::move(f)) {}
  std::variant<Butterworth4, FlatBand, TabulatedResponse> form_;
};

/// One attenuating or amplifying filter. The peak gain is a power ratio in dB,
/// so +20 dB means |H(0)|^2 = 100 and |H(0)| = 10.
struct FilterStage {
  FilterShape shape;
  double peak_gain_db = 0.0;

  double peak_magnitude() const;
};

double stage_magnitude(const FilterStage& stage, double omega);

/// Minimum-noise spectrum of a single stage in thermal equilibrium, applied
/// pointwise: (1-|H|^2) N_T where |H| <= 1 and (|H|^2-1)(N_T+1) where |H| > 1.
double stage_noise_spectrum(const FilterStage& stage, const PhysicalEnvironment& env, double omega);

struct SpectralPoint {
  double squared_magnitude = 0.0;
  double noise = 0.0;
};

/// Effective channel seen by the transmitter: |H(w)|^2 and S_N(w), both even in w.
/// Immutable; evaluation is thread-safe.
class ChannelModel {
 public:
  using Evaluator = std::function<SpectralPoint(double)>;

  ChannelModel(Evaluator eval, double support_hint, std::vector<double> breakpoints = {});

  SpectralPoint at(double omega) const { return eval_(omega); }
  double squared_magnitude(double omega) const { return eval_(omega).squared_magnitude; }
  double noise_spectrum(double omega) const { return eval_(omega).noise; }

  /// Detuning (rad/s) beyond which |H|^2 is negligible.
  double support_hint() const { return support_hint_; }

  /// Sorted non-negative detunings where either spectrum may be non-smooth.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

 private:
  Evaluator eval_;
  double support_hint_;
  std::vector<double> breakpoints_;
};

/// Composes stages in propagation order:
///   S(k) = |H_k|^2 S(k-1) + S_Nk,  S(0) = 0,  |H|^2 = prod |H_k|^2.
/// Throws InvalidParameter for an empty list.
ChannelModel cascade(std::span<const FilterStage> stages, const PhysicalEnvironment& env);

/// Same recurrence, seeded with an existing channel in place of S(0) = 0, |H|^2 = 1.
ChannelModel cascade(const ChannelModel& upstream, std::span<const FilterStage> stages,
                     const PhysicalEnvironment& env);

}  // namespace lticap
