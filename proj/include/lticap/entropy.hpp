#pragma once

namespace lticap {

/// Von Neumann entropy, in bits, of a single-mode bosonic thermal state with
/// mean photon number x:  (x+1) log2(x+1) - x log2(x).
///
/// Evaluated as a sum of non-negative terms on both sides of x = 1 so that the
/// relative error stays at the rounding level from x ~ 1e-300 up to 1e300.
/// Throws InvalidParameter for negative or non-finite x.
double thermal_entropy_bits(double x);

}  // namespace lticap
