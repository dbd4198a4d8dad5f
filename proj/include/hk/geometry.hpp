#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace hk {

using Vec = std::vector<double>;

double sq_dist(const Vec& a, const Vec& b);
double dist(const Vec& a, const Vec& b);

/// Transport/reaction weights (alpha, beta) of the metric family.
struct Params {
    double alpha = 1.0;
    double beta  = 4.0;

    /// Scaled length ell = sqrt(beta/(4 alpha)) * L. Transport activates for
    /// ell < pi/2 and dies entirely at ell >= pi.
    double scaled_length(double L) const { return std::sqrt(beta / (4.0 * alpha)) * L; }

    /// Weight 4/beta of the entropy terms.
    double lambda() const { return 4.0 / beta; }

    bool positive() const { return alpha > 0.0 && beta > 0.0; }
};

/// Point [x, r] of the cone over Omega. All radius-0 points are identified
/// with a single tip; the position of a tip is never read.
class ConePoint {
  public:
    ConePoint() = default;

    static ConePoint tip() { return ConePoint{}; }
    static ConePoint at(Vec x, double r);

    bool is_tip() const { return tip_; }
    double r() const { return r_; }
    const Vec& pos() const;

    /// Equality in the quotient: all tips are the same point.
    friend bool operator==(const ConePoint& a, const ConePoint& b);

  private:
    Vec x_{};
    double r_ = 0.0;
    bool tip_ = true;
};

/// cos(min(|a|, b)): the truncated cosine. b = pi governs the cone metric,
/// b = pi/2 transport activation.
double cos_trunc(double a, double b);

/// The squared-cost function S_{alpha,beta}(L^2, b0, b1), including the
/// degenerate alpha = 0 and/or beta = 0 branches. +inf is a regular value.
double sigma_ab(double L_sq, double b0, double b1, const Params& p);

/// Cone distance sqrt(S_{alpha,beta}(|x1-x0|^2, r0, r1)).
double cone_dist(const ConePoint& z0, const ConePoint& z1, const Params& p);

/// One sample of the cone geodesic: the point Z(s), its squared radius and
/// the transport fraction rho(s) in [0,1].
struct ConeGeodesicSample {
    ConePoint z;
    double r_sq = 0.0;
    double rho  = 0.0;
};

/// Constant-speed geodesic interpolator Z(s; z0, z1) on the cone. General
/// (alpha, beta) are handled by evaluating all angles in scaled length.
ConeGeodesicSample cone_geodesic(double s, const ConePoint& z0, const ConePoint& z1,
                                 const Params& p = {});

/// Optimal cost of moving a single Dirac of mass a0 to mass a1 over squared
/// distance L_sq: S_{alpha,beta}(L_sq, sqrt(a0), sqrt(a1)).
double one_mass_point_cost(double L_sq, double a0, double a1, const Params& p);

struct OneMassPointSample {
    double a   = 0.0; ///< mass a(s)
    double rho = 0.0; ///< transport fraction rho(s)
};

/// The minimizing one-mass-point curve at the (1,4) normalization.
/// Requires 0 <= L < pi and a0, a1 > 0 (for L >= pi no minimizer exists).
OneMassPointSample one_mass_point_curve(double s, double L, double a0, double a1);

/// Squared length of a sampled one-mass-point curve by trapezoidal quadrature
/// of the action integrand, centered differences, O(h^2). The reaction term
/// is evaluated in sqrt(a) coordinates so curves touching a = 0 stay finite.
double curve_length_1mp(std::span<const double> a_samples,
                        std::span<const double> rho_samples, double L, const Params& p);

} // namespace hk
