#pragma once

#include "extrap/types.hpp"

#include <string>

namespace extrap {

enum class CutoffKind { Sharp, Hinge, SmoothedHinge };

/// Convex cutoff chi: chi(x) = 0 for x <= 0, nondecreasing and convex, with
/// asymptotic slope K > 0. The weight exp(-chi(t + log r)) built from it is 1
/// near the submanifold and decays with rate K away from it.
///
///   Sharp:         chi = +inf for x > 0 (weight is the indicator of x <= 0)
///   Hinge:         chi(x) = K max(x, 0)
///   SmoothedHinge: C^1 blend, K x^2 / (2w) on (0, w), K (x - w/2) beyond
struct Cutoff {
  CutoffKind kind = CutoffKind::Hinge;
  double slope = 1.0;  // K
  double width = 0.0;  // w, SmoothedHinge only

  static Cutoff sharp();
  static Cutoff hinge(double slope);
  static Cutoff smoothed_hinge(double slope, double width);

  std::string describe() const;
};

Cutoff parse_cutoff(const std::string& spec);  // "kind,K[,w]"

/// chi(x). Accepts x = -inf (returns 0), so weights evaluate cleanly at r = 0.
double chi_eval(const Cutoff& c, double x);

/// Soft-cutoff mass factor C = d * Integral over R of exp(d x - chi(x)) dx.
/// Equals 1 for the sharp cutoff, exceeds 1 otherwise, and tends to 1 as the
/// slope grows. Requires slope > d (the integral diverges at or below it).
double mass_factor(const Cutoff& c, int d);

}  // namespace extrap
