#include "hk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hk/cone_ot.hpp"

namespace hk {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;
}

LimitReport wasserstein_limit_check(const DiscreteMeasure& mu0in,
                                    const DiscreteMeasure& mu1in,
                                    const std::vector<double>& betas,
                                    const SolverConfig& cfg) {
    const DiscreteMeasure mu0 = mu0in.merged(0.0);
    const DiscreteMeasure mu1 = mu1in.merged(0.0);
    const double m0 = mu0.total_mass();
    const double m1 = mu1.total_mass();
    if (m0 <= 0.0 || std::abs(m0 - m1) > 1e-12 * std::max(m0, m1))
        throw std::invalid_argument(
            "wasserstein_limit_check: masses must be equal and positive");

    LimitReport rep;
    {
        // Exact W2 between the normalized measures: balanced LP with
        // squared-Euclidean cost.
        const int n = static_cast<int>(mu0.atoms.size());
        const int m = static_cast<int>(mu1.atoms.size());
        std::vector<double> supply(n), demand(m),
            cost(static_cast<std::size_t>(n) * m);
        for (int i = 0; i < n; ++i) supply[i] = mu0.atoms[i].m / m0;
        for (int j = 0; j < m; ++j) demand[j] = mu1.atoms[j].m / m1;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j)
                cost[static_cast<std::size_t>(i) * m + j] =
                    sq_dist(mu0.atoms[i].x, mu1.atoms[j].x);
        const double w2 = std::sqrt(std::max(0.0, transport_lp(supply, demand, cost).value));
        // The beta -> 0 limit of the action is (|mu0|/alpha) W2(normalized)^2:
        // moving mass m over length L costs m L^2 / alpha.
        rep.target = std::sqrt(m0) * w2;
    }
    for (double beta : betas) {
        const double hk = hk_distance(mu0, mu1, {1.0, beta}, cfg).hk;
        rep.sequence.emplace_back(beta, hk);
        rep.deviations.push_back(std::abs(hk - rep.target));
    }
    return rep;
}

double hellinger_closed_form(const DiscreteMeasure& mu0in, const DiscreteMeasure& mu1in,
                             double beta) {
    const DiscreteMeasure mu0 = mu0in.merged(0.0);
    const DiscreteMeasure mu1 = mu1in.merged(0.0);
    double h_sq = 0.0;
    std::vector<char> used1(mu1.atoms.size(), 0);
    for (const auto& a0 : mu0.atoms) {
        bool shared = false;
        for (std::size_t j = 0; j < mu1.atoms.size(); ++j) {
            if (!used1[j] && mu1.atoms[j].x == a0.x) {
                const double d = std::sqrt(a0.m) - std::sqrt(mu1.atoms[j].m);
                h_sq += d * d;
                used1[j] = 1;
                shared   = true;
                break;
            }
        }
        if (!shared) h_sq += a0.m;
    }
    for (std::size_t j = 0; j < mu1.atoms.size(); ++j)
        if (!used1[j]) h_sq += mu1.atoms[j].m;
    return 2.0 / std::sqrt(beta) * std::sqrt(h_sq);
}

LimitReport hellinger_limit_check(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                                  const std::vector<double>& alphas,
                                  const SolverConfig& cfg) {
    LimitReport rep;
    rep.target = hellinger_closed_form(mu0, mu1, 4.0);
    for (double alpha : alphas) {
        const double hk = hk_distance(mu0, mu1, {alpha, 4.0}, cfg).hk;
        rep.sequence.emplace_back(alpha, hk);
        rep.deviations.push_back(std::abs(hk - rep.target));
    }
    return rep;
}

double lambda_convexity_check(const std::function<double(const Vec&)>& phi,
                              const GeodesicCurve& curve, double lambda,
                              const std::vector<double>& s_grid) {
    auto f = [&](double s) {
        double acc = 0.0;
        for (const auto& a : curve.eval(s).atoms) acc += phi(a.x) * a.m;
        return acc;
    };
    const double f0    = f(0.0);
    const double f1    = f(1.0);
    const double hk_sq = curve.plan_cost();
    double worst = -std::numeric_limits<double>::infinity();
    for (double s : s_grid) {
        const double bound =
            (1.0 - s) * f0 + s * f1 - lambda * s * (1.0 - s) / 2.0 * hk_sq;
        worst = std::max(worst, f(s) - bound);
    }
    return worst;
}

LogEntropyIdentity log_entropy_identity_check(double e1, double m1, double omega_vol,
                                              const std::vector<double>& s_grid) {
    auto e = [&](double s) {
        const double s2 = s * s;
        const double ent = s2 > 0.0 ? s2 * std::log(s2) : 0.0; // s^2 log s^2 -> 0
        return s2 * e1 + ent * m1 + (1.0 - s2) * omega_vol;
    };
    LogEntropyIdentity out;
    out.endpoint_deviation =
        std::max(std::abs(e(1.0) - e1), std::abs(e(0.0) - omega_vol));
    out.min_second_difference = std::numeric_limits<double>::infinity();
    for (double s : s_grid) {
        const double h = std::min(1e-3, s * 0.5);
        if (h <= 0.0) continue;
        const double dd = (e(s + h) - 2.0 * e(s) + e(s - h)) / (h * h);
        out.min_second_difference = std::min(out.min_second_difference, dd);
    }
    return out;
}

SemiconcavityWitness semiconcavity_witness(double b, double y) {
    if (b <= 0.0 || y <= 0.0)
        throw std::invalid_argument("semiconcavity_witness: requires b, y > 0");
    SemiconcavityWitness w;
    w.b = b;
    w.y = y;
    const double c1 = cos_trunc(y, kHalfPi);
    const double c2 = cos_trunc(std::sqrt(y * y + kHalfPi * kHalfPi / 4.0), kHalfPi);
    w.phi     = std::sqrt(8.0) * c1 - 4.0 * c2;
    w.k_lower = 1.0 + std::sqrt(b) * w.phi;

    // Independent route: the three Dirac-pair distances from the solver.
    const Vec x0{0.0, 0.0};
    const Vec x1{kHalfPi, 0.0};
    const Vec xm{kHalfPi / 2.0, 0.0};
    const Vec z{kHalfPi / 2.0, y};
    auto dirac = [](const Vec& x, double m) {
        DiscreteMeasure mu(2);
        mu.add(x, m);
        return mu;
    };
    SolverConfig cfg;
    cfg.tol = 1e-10;
    const Params p{1.0, 4.0};
    const double d0  = hk_distance(dirac(x0, 1.0), dirac(z, b), p, cfg).hk_sq;
    const double d1  = hk_distance(dirac(x1, 1.0), dirac(z, b), p, cfg).hk_sq;
    const double dm  = hk_distance(dirac(xm, 0.5), dirac(z, b), p, cfg).hk_sq;
    const double d01 = hk_distance(dirac(x0, 1.0), dirac(x1, 1.0), p, cfg).hk_sq;
    w.solver_k = (0.5 * d0 + 0.5 * d1 - dm) / (0.25 * d01);
    return w;
}

} // namespace hk
