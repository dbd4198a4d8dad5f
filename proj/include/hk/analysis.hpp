#pragma once

#include <functional>
#include <vector>

#include "hk/et.hpp"
#include "hk/geodesic.hpp"

namespace hk {

struct LimitReport {
    std::vector<std::pair<double, double>> sequence; ///< (parameter, hk)
    double target = 0.0;
    std::vector<double> deviations; ///< |hk - target| per step
};

/// hk_{1,beta} along a decreasing beta sequence against the Wasserstein
/// target W2(mu0/|mu0|, mu1/|mu1|)/sqrt(|mu0|). Rejects unequal masses
/// (the limit is +inf there).
LimitReport wasserstein_limit_check(const DiscreteMeasure& mu0,
                                    const DiscreteMeasure& mu1,
                                    const std::vector<double>& betas,
                                    const SolverConfig& cfg = {});

/// Discrete Hellinger distance sqrt(sum_shared (sqrt m0 - sqrt m1)^2 + rest),
/// i.e. the alpha = 0 closed form at beta = 4 (general beta scales by
/// 2/sqrt(beta)).
double hellinger_closed_form(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                             double beta = 4.0);

/// hk_{alpha,4} along a decreasing alpha sequence against the Hellinger
/// target.
LimitReport hellinger_limit_check(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                                  const std::vector<double>& alphas,
                                  const SolverConfig& cfg = {});

/// Worst violation of the Lambda-convexity inequality for the linear
/// functional F_phi along the curve; <= 0 means no violation found.
double lambda_convexity_check(const std::function<double(const Vec&)>& phi,
                              const GeodesicCurve& curve, double lambda,
                              const std::vector<double>& s_grid);

struct LogEntropyIdentity {
    double endpoint_deviation   = 0.0; ///< worst of |e(1)-e1|, |e(0)-vol|
    double min_second_difference = 0.0;
};

/// Scalar check of the identity e(s) = s^2 e1 + s^2 log(s^2) m1 + (1-s^2) vol
/// along the Hellinger geodesic from the null measure; the reported second
/// difference documents the loss of semiconvexity as s -> 0.
LogEntropyIdentity log_entropy_identity_check(double e1, double m1, double omega_vol,
                                              const std::vector<double>& s_grid);

struct SemiconcavityWitness {
    double b = 0.0, y = 0.0;
    double phi = 0.0;      ///< sqrt(8) cos_{pi/2}(y) - 4 cos_{pi/2}(sqrt(y^2+pi^2/16))
    double k_lower = 0.0;  ///< 1 + sqrt(b) phi
    double solver_k = 0.0; ///< the same quotient from solved HK distances
};

/// The d >= 2 configuration witnessing that HK is not K-semiconcave for any
/// K: x0 = 0, x1 = (pi/2)e1, mu* = b delta_z with z = (pi/4)e1 + y e2.
SemiconcavityWitness semiconcavity_witness(double b, double y);

} // namespace hk
