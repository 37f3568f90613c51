#pragma once

#include "extrap/types.hpp"

#include <functional>
#include <utility>

namespace extrap {

/// Gauss-Legendre nodes and weights on [-1, 1]. Cached per n; thread-safe.
const std::pair<RealVector, RealVector>& gauss_legendre(int n);

/// Nodes/weights of the n-point Gauss-Legendre rule mapped to [a, b].
std::pair<RealVector, RealVector> gauss_legendre_on(int n, double a, double b);

/// Adaptive Simpson on [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 48);

}  // namespace extrap
