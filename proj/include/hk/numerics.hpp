#pragma once

#include <functional>

namespace hk {

/// Complete elliptic integral K(k) by the arithmetic-geometric mean.
double elliptic_k(double k);

/// Incomplete elliptic integral of the first kind F(phi, k) via Carlson R_F.
double elliptic_f(double phi, double k);

/// Carlson symmetric form R_F(x, y, z) by the duplication theorem.
double carlson_rf(double x, double y, double z);

/// Adaptive Simpson quadrature to absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol);

/// Bisection for a root of f on [lo, hi]; requires a sign change.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol, int max_iter = 200);

} // namespace hk
