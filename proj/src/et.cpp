#include "hk/et.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hk {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kInf    = std::numeric_limits<double>::infinity();

} // namespace

double boltzmann_f(double z) {
    if (z == 0.0) return 1.0;
    return z * std::log(z) - z + 1.0;
}

CostMatrix build_cost(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                      const Params& p) {
    if (!p.positive()) throw std::invalid_argument("build_cost: requires alpha, beta > 0");
    CostMatrix cm;
    cm.n = static_cast<int>(mu0.atoms.size());
    cm.m = static_cast<int>(mu1.atoms.size());
    const std::size_t total = static_cast<std::size_t>(cm.n) * cm.m;
    cm.c.resize(total);
    cm.k.resize(total);
    cm.ell.resize(total);
    for (int i = 0; i < cm.n; ++i) {
        for (int j = 0; j < cm.m; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * cm.m + j;
            const double L  = dist(mu0.atoms[i].x, mu1.atoms[j].x);
            const double el = p.scaled_length(L);
            cm.ell[idx] = el;
            if (el < kHalfPi) {
                const double cl = std::cos(el);
                cm.c[idx] = -(8.0 / p.beta) * std::log(cl);
                cm.k[idx] = cl * cl;
            } else {
                cm.c[idx] = kInf;
                cm.k[idx] = 0.0;
            }
        }
    }
    return cm;
}

double CalibrationMatrix::total() const {
    double s = 0.0;
    for (double v : eta) s += v;
    return s;
}

void CalibrationMatrix::refresh(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1) {
    eta0.assign(n, 0.0);
    eta1.assign(m, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            const double v = at(i, j);
            eta0[i] += v;
            eta1[j] += v;
        }
    rho0.resize(n);
    rho1.resize(m);
    for (int i = 0; i < n; ++i) rho0[i] = eta0[i] / mu0.atoms[i].m;
    for (int j = 0; j < m; ++j) rho1[j] = eta1[j] / mu1.atoms[j].m;
}

double KktResiduals::max_all() const {
    return std::max({support_length, inequality, complementarity});
}

double et_value(const CalibrationMatrix& eta, const DiscreteMeasure& mu0,
                const DiscreteMeasure& mu1, const CostMatrix& cost, const Params& p) {
    const double lam = p.lambda();
    double transport = 0.0;
    for (int i = 0; i < eta.n; ++i)
        for (int j = 0; j < eta.m; ++j) {
            const double v = eta.at(i, j);
            if (v > 0.0) {
                if (cost.cost(i, j) == kInf) return kInf;
                transport += cost.cost(i, j) * v;
            }
        }
    double entropy = 0.0;
    for (int i = 0; i < eta.n; ++i) entropy += mu0.atoms[i].m * boltzmann_f(eta.rho0[i]);
    for (int j = 0; j < eta.m; ++j) entropy += mu1.atoms[j].m * boltzmann_f(eta.rho1[j]);
    return lam * entropy + transport;
}

KktResiduals kkt_check(const CalibrationMatrix& eta, const CostMatrix& cost,
                       const DiscreteMeasure& mu0, const DiscreteMeasure& mu1) {
    // Recompute the densities from eta so stale marginals cannot mislead.
    std::vector<double> rho0(eta.n, 0.0), rho1(eta.m, 0.0);
    for (int i = 0; i < eta.n; ++i)
        for (int j = 0; j < eta.m; ++j) {
            rho0[i] += eta.at(i, j);
            rho1[j] += eta.at(i, j);
        }
    for (int i = 0; i < eta.n; ++i) rho0[i] /= mu0.atoms[i].m;
    for (int j = 0; j < eta.m; ++j) rho1[j] /= mu1.atoms[j].m;

    KktResiduals r;
    for (int i = 0; i < eta.n; ++i)
        for (int j = 0; j < eta.m; ++j) {
            const double v  = eta.at(i, j);
            const double kk = cost.kval(i, j);
            if (cost.len(i, j) >= kHalfPi)
                r.support_length = std::max(r.support_length, v);
            const double prod = rho0[i] * rho1[j];
            r.inequality = std::max(r.inequality, kk - prod);
            if (v > 0.0)
                r.complementarity = std::max(r.complementarity, std::abs(prod - kk));
        }
    r.inequality = std::max(r.inequality, 0.0);
    return r;
}

namespace {

/// Log-domain annealed scaling stage for the KL-marginal relaxation.
/// Returns eta through `cal`; masked (infinite-cost) entries stay exactly 0.
int scaling_stage(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                  const CostMatrix& cost, const Params& p, const SolverConfig& cfg,
                  CalibrationMatrix& cal) {
    const int n = cal.n, m = cal.m;
    const double lam = p.lambda();

    double cbar = 0.0;
    for (double v : cost.c)
        if (v != kInf) cbar = std::max(cbar, v);
    if (cbar == 0.0) cbar = 1.0;

    std::vector<char> row_live(n, 0), col_live(m, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (cost.cost(i, j) != kInf) {
                row_live[i] = 1;
                col_live[j] = 1;
            }

    std::vector<double> logu(n, 0.0), logv(m, 0.0);
    std::vector<double> logm0(n), logm1(m);
    for (int i = 0; i < n; ++i) logm0[i] = std::log(mu0.atoms[i].m);
    for (int j = 0; j < m; ++j) logm1[j] = std::log(mu1.atoms[j].m);

    auto lse_row = [&](int i, double eps) {
        double best = -kInf;
        for (int j = 0; j < m; ++j) {
            const double c = cost.cost(i, j);
            if (c == kInf) continue;
            best = std::max(best, -c / eps + logm1[j] + logv[j]);
        }
        if (best == -kInf) return -kInf;
        double s = 0.0;
        for (int j = 0; j < m; ++j) {
            const double c = cost.cost(i, j);
            if (c == kInf) continue;
            s += std::exp(-c / eps + logm1[j] + logv[j] - best);
        }
        return best + std::log(s);
    };
    auto lse_col = [&](int j, double eps) {
        double best = -kInf;
        for (int i = 0; i < n; ++i) {
            const double c = cost.cost(i, j);
            if (c == kInf) continue;
            best = std::max(best, -c / eps + logm0[i] + logu[i]);
        }
        if (best == -kInf) return -kInf;
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            const double c = cost.cost(i, j);
            if (c == kInf) continue;
            s += std::exp(-c / eps + logm0[i] + logu[i] - best);
        }
        return best + std::log(s);
    };

    int iters = 0;
    double eps_last = cfg.eps_schedule.empty() ? 1e-4 * cbar : cfg.eps_schedule.back() * cbar;
    for (double eps_rel : cfg.eps_schedule) {
        const double eps = eps_rel * cbar;
        eps_last = eps;
        const double expo = lam / (lam + eps);
        for (int it = 0; it < cfg.max_iter_scaling; ++it) {
            double delta = 0.0;
            for (int i = 0; i < n; ++i) {
                if (!row_live[i]) continue;
                const double nu = -expo * lse_row(i, eps);
                delta = std::max(delta, std::abs(nu - logu[i]));
                logu[i] = nu;
            }
            for (int j = 0; j < m; ++j) {
                if (!col_live[j]) continue;
                const double nv = -expo * lse_col(j, eps);
                delta = std::max(delta, std::abs(nv - logv[j]));
                logv[j] = nv;
            }
            ++iters;
            if (delta < 1e-13) break;
        }
    }

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            const double c = cost.cost(i, j);
            cal.at(i, j) = (c == kInf || !row_live[i] || !col_live[j])
                               ? 0.0
                               : std::exp(logu[i] + logv[j] - c / eps_last + logm0[i] +
                                          logm1[j]);
        }
    cal.refresh(mu0, mu1);
    return iters;
}

/// Coordinatewise refinement removing the entropic bias. Holding everything
/// else fixed, the optimal value of one entry solves
///   (4/beta)(log rho0_i + log rho1_j) + c_ij = 0
/// i.e. (a + t)(b + t) = mu0_i mu1_j K_ij with a, b the marginals without the
/// entry, whose nonnegative root is a clamped quadratic formula. Cyclic exact
/// sweeps converge to the global optimum of the convex objective and are
/// immune to the near-boundary curvature that stalls fixed-step gradients.
int coordinate_stage(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                     const CostMatrix& cost, const Params& p, const SolverConfig& cfg,
                     double kkt_target, CalibrationMatrix& cal, KktResiduals& kkt) {
    (void)p;
    std::vector<std::pair<int, int>> live;
    for (int i = 0; i < cal.n; ++i)
        for (int j = 0; j < cal.m; ++j)
            if (cost.cost(i, j) != kInf) live.emplace_back(i, j);
    if (live.empty()) {
        kkt = kkt_check(cal, cost, mu0, mu1);
        return 0;
    }

    int it = 0;
    for (; it < cfg.max_iter_gradient; ++it) {
        cal.refresh(mu0, mu1);
        kkt = kkt_check(cal, cost, mu0, mu1);
        if (kkt.max_all() <= kkt_target) break;

        for (const auto& [i, j] : live) {
            const double v = cal.at(i, j);
            const double a = std::max(cal.eta0[i] - v, 0.0);
            const double b = std::max(cal.eta1[j] - v, 0.0);
            const double q = mu0.atoms[i].m * mu1.atoms[j].m * cost.kval(i, j);
            const double d = a - b;
            const double t =
                std::max(0.0, 0.5 * (-(a + b) + std::sqrt(d * d + 4.0 * q)));
            cal.at(i, j) = t;
            cal.eta0[i]  = a + t;
            cal.eta1[j]  = b + t;
        }
    }
    cal.refresh(mu0, mu1);
    kkt = kkt_check(cal, cost, mu0, mu1);
    return it;
}

} // namespace

EtReport solve_et(const DiscreteMeasure& mu0in, const DiscreteMeasure& mu1in,
                  const Params& p, const SolverConfig& cfg) {
    if (!p.positive()) throw std::invalid_argument("solve_et: requires alpha, beta > 0");
    const DiscreteMeasure mu0 = mu0in.merged(0.0);
    const DiscreteMeasure mu1 = mu1in.merged(0.0);

    EtReport rep;
    rep.eta.n = static_cast<int>(mu0.atoms.size());
    rep.eta.m = static_cast<int>(mu1.atoms.size());
    rep.eta.eta.assign(static_cast<std::size_t>(rep.eta.n) * rep.eta.m, 0.0);

    if (mu0.atoms.empty() || mu1.atoms.empty()) {
        rep.eta.refresh(mu0, mu1);
        rep.value     = p.lambda() * (mu0.total_mass() + mu1.total_mass());
        rep.solver    = "scaling";
        rep.converged = true;
        return rep;
    }

    const CostMatrix cost = build_cost(mu0, mu1, p);

    rep.iterations = scaling_stage(mu0, mu1, cost, p, cfg, rep.eta);
    rep.solver     = "scaling";

    // Guard against a divergent scaling stage: eta = 0 is always feasible.
    {
        CalibrationMatrix zero = rep.eta;
        std::fill(zero.eta.begin(), zero.eta.end(), 0.0);
        zero.refresh(mu0, mu1);
        rep.eta.refresh(mu0, mu1);
        if (!(et_value(rep.eta, mu0, mu1, cost, p) <=
              et_value(zero, mu0, mu1, cost, p)))
            rep.eta = zero;
    }

    const double kkt_target = std::clamp(cfg.tol * 1e-3, 1e-13, 1e-9);
    rep.iterations +=
        coordinate_stage(mu0, mu1, cost, p, cfg, kkt_target, rep.eta, rep.kkt);
    rep.solver = "coordinate";

    rep.value     = et_value(rep.eta, mu0, mu1, cost, p);
    rep.converged = rep.kkt.max_all() <= cfg.tol;
    return rep;
}

HkResult hk_distance(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                     const Params& p, const SolverConfig& cfg) {
    HkResult res;
    res.report = solve_et(mu0, mu1, p, cfg);
    res.hk_sq  = res.report.value;
    res.hk     = std::sqrt(std::max(res.hk_sq, 0.0));
    const double identity = p.lambda() * (mu0.total_mass() + mu1.total_mass() -
                                          2.0 * res.report.eta.total());
    res.mass_identity_discrepancy = std::abs(res.hk_sq - identity);
    return res;
}

double brute_force_et(const DiscreteMeasure& mu0in, const DiscreteMeasure& mu1in,
                      const Params& p, double grid_resolution) {
    const DiscreteMeasure mu0 = mu0in.merged(0.0);
    const DiscreteMeasure mu1 = mu1in.merged(0.0);
    const int n = static_cast<int>(mu0.atoms.size());
    const int m = static_cast<int>(mu1.atoms.size());
    if (n * m > 4) throw std::invalid_argument("brute_force_et: supports n*m <= 4 only");
    if (n == 0 || m == 0) return p.lambda() * (mu0.total_mass() + mu1.total_mass());

    const CostMatrix cost = build_cost(mu0, mu1, p);
    CalibrationMatrix cal;
    cal.n = n;
    cal.m = m;
    cal.eta.assign(static_cast<std::size_t>(n) * m, 0.0);

    std::vector<std::size_t> live;
    for (std::size_t q = 0; q < cal.eta.size(); ++q)
        if (cost.c[q] != kInf) live.push_back(q);

    auto eval = [&]() {
        cal.refresh(mu0, mu1);
        return et_value(cal, mu0, mu1, cost, p);
    };
    if (live.empty()) return eval();

    const double bound = std::max(mu0.total_mass(), mu1.total_mass());

    // Coarse localization grid over the free coordinates.
    const int grid_n = 12;
    std::vector<int> idx(live.size(), 0);
    std::vector<double> best(live.size(), 0.0);
    double best_val = kInf;
    while (true) {
        for (std::size_t q = 0; q < live.size(); ++q)
            cal.eta[live[q]] = bound * idx[q] / (grid_n - 1);
        const double v = eval();
        if (v < best_val) {
            best_val = v;
            for (std::size_t q = 0; q < live.size(); ++q) best[q] = cal.eta[live[q]];
        }
        std::size_t carry = 0;
        while (carry < idx.size() && ++idx[carry] == grid_n) idx[carry++] = 0;
        if (carry == idx.size()) break;
    }
    for (std::size_t q = 0; q < live.size(); ++q) cal.eta[live[q]] = best[q];

    // Golden-section refinement, cycling the coordinates; the objective is
    // jointly convex, so this converges to the global optimum.
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    const double xtol   = std::max(grid_resolution * 1e-3, 1e-13) * std::max(bound, 1.0);
    double prev_val     = best_val;
    for (int sweep = 0; sweep < 400; ++sweep) {
        for (std::size_t q = 0; q < live.size(); ++q) {
            double lo = 0.0, hi = bound;
            auto fcoord = [&](double t) {
                cal.eta[live[q]] = t;
                return eval();
            };
            double x1 = hi - golden * (hi - lo);
            double x2 = lo + golden * (hi - lo);
            double f1 = fcoord(x1), f2 = fcoord(x2);
            while (hi - lo > xtol) {
                if (f1 <= f2) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - golden * (hi - lo);
                    f1 = fcoord(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + golden * (hi - lo);
                    f2 = fcoord(x2);
                }
            }
            cal.eta[live[q]] = f1 <= f2 ? x1 : x2;
        }
        const double v = eval();
        if (std::abs(prev_val - v) < 1e-15 * (1.0 + std::abs(v))) break;
        prev_val = v;
    }
    return eval();
}

} // namespace hk
