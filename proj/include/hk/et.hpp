#pragma once

#include <string>
#include <vector>

#include "hk/measure.hpp"

namespace hk {

/// Transport costs between the supports of mu0 and mu1.
/// ell = scaled length, c = -(8/beta) log cos(ell) for ell < pi/2 (else +inf),
/// K = exp(-(beta/4) c) = cos^2(ell) truncated to 0 at ell >= pi/2.
struct CostMatrix {
    int n = 0, m = 0;
    std::vector<double> c;   ///< n*m, row-major; +inf beyond the threshold
    std::vector<double> k;   ///< K_ij in [0,1]; K = 0 iff c = +inf
    std::vector<double> ell; ///< scaled lengths

    double cost(int i, int j) const { return c[static_cast<std::size_t>(i) * m + j]; }
    double kval(int i, int j) const { return k[static_cast<std::size_t>(i) * m + j]; }
    double len(int i, int j) const { return ell[static_cast<std::size_t>(i) * m + j]; }
};

CostMatrix build_cost(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                      const Params& p);

/// Discrete calibration measure eta with its marginals and densities
/// rho_i = eta_i / mu_i.
struct CalibrationMatrix {
    int n = 0, m = 0;
    std::vector<double> eta;  ///< n*m, row-major
    std::vector<double> eta0; ///< row sums
    std::vector<double> eta1; ///< column sums
    std::vector<double> rho0; ///< eta0 / mu0 masses
    std::vector<double> rho1; ///< eta1 / mu1 masses

    double& at(int i, int j) { return eta[static_cast<std::size_t>(i) * m + j]; }
    double at(int i, int j) const { return eta[static_cast<std::size_t>(i) * m + j]; }
    double total() const;

    /// Recompute marginals and densities from eta.
    void refresh(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1);
};

struct KktResiduals {
    double support_length  = 0.0; ///< max eta_ij over pairs with ell >= pi/2
    double inequality      = 0.0; ///< max (K_ij - rho0_i rho1_j)_+ over all pairs
    double complementarity = 0.0; ///< max |rho0_i rho1_j - K_ij| over eta_ij > 0

    double max_all() const;
};

struct SolverConfig {
    double tol = 1e-6;
    std::vector<double> eps_schedule{1e-1, 1e-2, 1e-3, 1e-4};
    int max_iter_scaling  = 10000; ///< per annealing stage
    int max_iter_gradient = 50000; ///< refinement sweeps after annealing
};

struct EtReport {
    double value = 0.0; ///< ET optimal value = HK^2
    CalibrationMatrix eta;
    KktResiduals kkt;
    int iterations = 0;
    std::string solver; ///< "scaling" | "coordinate" | "brute"
    bool converged = false;
};

/// Boltzmann function F_B(z) = z log z - z + 1, F_B(0) = 1.
double boltzmann_f(double z);

/// Value of the entropy-transport functional at eta (+inf if eta charges an
/// infinite-cost pair).
double et_value(const CalibrationMatrix& eta, const DiscreteMeasure& mu0,
                const DiscreteMeasure& mu1, const CostMatrix& cost, const Params& p);

KktResiduals kkt_check(const CalibrationMatrix& eta, const CostMatrix& cost,
                       const DiscreteMeasure& mu0, const DiscreteMeasure& mu1);

/// Minimize the entropy-transport functional: annealed multiplicative scaling
/// followed by exact coordinatewise refinement until the KKT residuals meet
/// the tolerance. Deterministic. A report with converged = false carries the
/// best iterate; it is never silently a bad value.
EtReport solve_et(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                  const Params& p, const SolverConfig& cfg = {});

struct HkResult {
    double hk    = 0.0;
    double hk_sq = 0.0;
    EtReport report;
    /// |value - (4/beta)(|mu0| + |mu1| - 2 eta(Omega x Omega))|
    double mass_identity_discrepancy = 0.0;
};

HkResult hk_distance(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                     const Params& p, const SolverConfig& cfg = {});

/// Independent oracle for tiny instances (n*m <= 4): coordinate localization
/// grid plus golden-section refinement of the jointly convex objective.
double brute_force_et(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                      const Params& p, double grid_resolution = 1e-3);

} // namespace hk
