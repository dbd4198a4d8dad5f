#pragma once

namespace hk::tol {

// Shared tolerance table. Algebraic identities are checked at eq_tol,
// quadrature-based quantities at quad_tol, iterative solver residuals
// at solver_tol.
inline constexpr double eq_tol     = 1e-12;
inline constexpr double quad_tol   = 1e-6;
inline constexpr double solver_tol = 1e-6;

} // namespace hk::tol
