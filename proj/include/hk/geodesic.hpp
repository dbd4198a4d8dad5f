#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "hk/measure.hpp"

namespace hk {

/// Geodesic curve in (M(Omega), HK) stored as plan records: moving atoms
/// plus pure annihilation ((1-s)^2) and creation (s^2) parts. eval is
/// closed-form per record, so the algebraic mass identities hold exactly.
struct GeodesicCurve {
    struct Record {
        ConePoint z0, z1;
        double g = 0.0;
    };

    std::vector<Record> pairs;
    DiscreteMeasure pure0; ///< annihilated part, weight scales as (1-s)^2
    DiscreteMeasure pure1; ///< created part, weight scales as s^2
    Params params;

    DiscreteMeasure eval(double s) const;

    /// Squared HK length of the underlying plan: transport records at the
    /// cone metric plus (4/beta) times the pure masses.
    double plan_cost() const;
};

GeodesicCurve geodesic_from_plan(const ConePlan& gamma, const Params& p);

struct MassProfile {
    double m0 = 0.0, m1 = 0.0;
    double m_star = 0.0; ///< sum g r0 r1 cos_pi(ell) over transport records
    double hk_sq = 0.0;  ///< plan cost
    double worst_deviation = 0.0;
};

/// Checks the quadratic mass formula and the mass identity
/// m(s) = (1-s)m0 + sm1 - s(1-s)(beta/4)hk_sq on a grid of s; returns the
/// worst deviation across both.
MassProfile mass_profile(const GeodesicCurve& curve);

/// Hellinger geodesic at the (1,4) normalization: shared atoms interpolate
/// sqrt-linearly, the rest scales (1-s)^2 / s^2.
GeodesicCurve hellinger_geodesic(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1);

/// Dilation geodesic collapsing mu1 toward a Dirac at y0. Atoms at scaled
/// distance >= pi/2 become pure creation parts.
GeodesicCurve dilation_geodesic(const DiscreteMeasure& mu1, const Vec& y0,
                                const Params& p = {});

/// Scalar potential xi(s, u) with Xi = d_u xi, in a 1-D coordinate u obtained
/// from atom positions through `coord` (segment or radial parametrization).
struct PotentialField {
    std::function<double(double, double)> xi;
    std::function<double(double, double)> Xi;
    std::function<double(const Vec&)> coord;
};

struct GridSpec {
    double s_lo = 0.1, s_hi = 0.9, ds = 1e-3;
    double x_lo = 0.0, x_hi = 1.0, dx = 1e-3;
};

/// Max |d_s xi + 1/2 |d_u xi|^2 + 2 xi^2| over interior grid nodes with
/// centered finite differences (the field's analytic Xi is not consulted).
double hamilton_jacobi_residual(const PotentialField& field, const GridSpec& grid);

struct TestFunction {
    std::function<double(double)> psi;
    std::function<double(double)> dpsi;
};

/// Monomials 1, u, u^2, ..., up to the given degree.
std::vector<TestFunction> monomial_tests(int max_degree);

/// Max deviation of the weak continuity equation
/// d/ds int psi dmu_s = int (4 xi psi + Xi psi') dmu_s over s in [0.1, 0.9]
/// and the supplied test functions; centered differences with step ds.
double continuity_residual(const GeodesicCurve& curve, const PotentialField& field,
                           const std::vector<TestFunction>& tests, double ds);

/// The family of geodesics between two Diracs at critical scaled distance
/// pi/2 ((1,4) normalization), parametrized by point masses (r, w) of the
/// reduced plan plus pure endpoint masses b0, b1.
struct TwoDiracFamily {
    GeodesicCurve curve;
    PotentialField field; ///< xi(s,u) = (sin^2 u - s)/(2s(1-s)) on the segment
    double a0 = 0.0, a1 = 0.0;
};

TwoDiracFamily two_dirac_family(const Vec& y0, const Vec& y1,
                                const std::vector<std::pair<double, double>>& weights,
                                double b0, double b1);

struct ShootingFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CharFnConfig {
    int grid_n = 801;              ///< samples of h over I0 = [0, pi/4]
    std::vector<double> frame_s{}; ///< defaults to {0, 0.05, ..., 1}
    double bis_tol = 1e-13;
};

/// Geodesic between the characteristic functions chi_[-pi/4,pi/4] and
/// chi_[pi/2,pi]: elliptic calibration of (w*, c*), the monotone transport
/// map h with h(0)=pi/2, h(pi/4)=3pi/4, its densities, and density frames.
struct CharGeodesic {
    double w_star = 0.0;
    double c_star = 0.0;
    std::vector<double> x;    ///< grid on I0
    std::vector<double> h;    ///< transport map samples
    std::vector<double> hp;   ///< h' samples
    std::vector<double> rho0; ///< density of eta0 w.r.t. mu0 on I0
    std::vector<double> y;    ///< grid on I1 = [pi/2, 3pi/4]
    std::vector<double> rho1; ///< density of eta1 w.r.t. mu1 on I1
    double marginal_mismatch = 0.0; ///< |int rho0 - int rho1| by quadrature

    struct FrameSample {
        double s, y, density;
    };
    std::vector<FrameSample> frames;

    double h_at(double xq) const;      ///< map value by branch inversion
    double hprime_at(double xq) const; ///< derivative (+inf at x = pi/4)
    double rho0_at(double xq) const;
    double rho1_at(double yq) const;

    // branch evaluators bound at construction
    std::function<double(double)> h_fn_, hp_fn_, rho0_fn_, rho1_fn_;
};

CharGeodesic char_function_geodesic(const CharFnConfig& cfg = {});

} // namespace hk
