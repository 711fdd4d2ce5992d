#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <limits>
#include <numbers>

#include "lticap/entropy.hpp"
#include "lticap/units.hpp"

using lticap::thermal_entropy_bits;

TEST(ThermalEntropy, Anchors) {
  EXPECT_EQ(thermal_entropy_bits(0.0), 0.0);
  EXPECT_NEAR(thermal_entropy_bits(1.0), 2.0, 1e-15);
  EXPECT_NEAR(thermal_entropy_bits(10.0) / 4.834466856136646, 1.0, 1e-14);
}

TEST(ThermalEntropy, SmallArgumentAsymptote) {
  // g(x) ~ x (1 - ln x) / ln 2 for x -> 0
  for (double x : {1e-30, 1e-20, 1e-12, 1e-8}) {
    const double approx = x * (1.0 - std::log(x)) / std::numbers::ln2;
    EXPECT_NEAR(thermal_entropy_bits(x) / approx, 1.0, std::max(2.0 * x, 1e-15)) << x;
  }
}

TEST(ThermalEntropy, LargeArgumentAsymptote) {
  // g(x) = log2(e (x + 1/2)) + O(1/x^2)
  const double x = 1e12;
  EXPECT_NEAR(thermal_entropy_bits(x), std::log2(x * std::numbers::e), 1e-10);
}

TEST(ThermalEntropy, IncreasingAndConcave) {
  double prev_x = 0.0, prev_g = 0.0, prev_slope = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 400; ++i) {
    const double x = std::pow(10.0, -12.0 + 0.05 * i);
    const double g = thermal_entropy_bits(x);
    const double slope = (g - prev_g) / (x - prev_x);
    EXPECT_GT(g, prev_g);
    EXPECT_LE(slope, prev_slope * (1.0 + 1e-9));
    prev_x = x;
    prev_g = g;
    prev_slope = slope;
  }
}

TEST(ThermalEntropy, BranchesAgreeAtOne) {
  const double below = thermal_entropy_bits(std::nextafter(1.0, 0.0));
  const double above = thermal_entropy_bits(std::nextafter(1.0, 2.0));
  EXPECT_NEAR(below, above, 1e-14);
}

TEST(ThermalEntropy, RejectsInvalidArguments) {
  EXPECT_THROW(thermal_entropy_bits(-1e-300), lticap::InvalidParameter);
  EXPECT_THROW(thermal_entropy_bits(std::numeric_limits<double>::quiet_NaN()), lticap::InvalidParameter);
  EXPECT_THROW(thermal_entropy_bits(std::numeric_limits<double>::infinity()), lticap::InvalidParameter);
}
