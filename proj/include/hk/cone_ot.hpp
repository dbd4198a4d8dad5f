#pragma once

#include <stdexcept>

#include "hk/et.hpp"
#include "hk/measure.hpp"

namespace hk {

struct ConeOtResult {
    double value = 0.0; ///< squared transport cost (+inf when masses differ)
    ConePlan plan;
    bool balanced = false;
};

/// Exact balanced optimal transport on the cone with cost d_cone^2
/// (transportation simplex). +inf when total weights differ by more than
/// 1e-12 relative.
ConeOtResult wasserstein_cone(const ConeMeasure& lam0, const ConeMeasure& lam1,
                              const Params& p);

/// kappa_* = max{0, theta1 - rho0, theta0 - rho1}: the reservoir size beyond
/// which extra tip mass changes nothing.
double reservoir_kappa(const ConeMeasure& lam0, const ConeMeasure& lam1);

/// W_rsv: cone transport with kappa_* tip padding added to both sides.
ConeOtResult reservoir_distance(const ConeMeasure& lam0, const ConeMeasure& lam1,
                                const Params& p);

/// Total plan mass on pairs with both radii positive and scaled length
/// exceeding pi/2 + slack; 0 means the no-long-transport property holds.
double check_no_long_transport(const ConePlan& plan, const Params& p,
                               double slack = 0.0);

struct LiftResult {
    double value = 0.0; ///< cone cost of the constructed plan
    ConePlan plan;
};

struct ValueMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Builds the lift plan gamma_eta from a converged ET report: transported
/// pairs at radii sqrt(sigma_i) = sqrt(mu_i / eta_i), pure parts paired with
/// the tip at radius 1. Throws ValueMismatch if the cone cost of the plan
/// and the ET value disagree beyond 2x solver tolerance.
LiftResult hk_via_lifts(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                        const EtReport& report, const Params& p);

/// Exact LP for generic balanced transport: supplies, demands, dense cost;
/// used by the cone solver and by the Wasserstein limit target.
struct TransportSolution {
    double value = 0.0;
    std::vector<std::tuple<int, int, double>> flows; ///< (i, j, mass), g > 0
};

TransportSolution transport_lp(const std::vector<double>& supply,
                               const std::vector<double>& demand,
                               const std::vector<double>& cost_row_major);

} // namespace hk
