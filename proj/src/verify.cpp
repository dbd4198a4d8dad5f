#include "hk/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hk/analysis.hpp"
#include "hk/cone_ot.hpp"
#include "hk/et.hpp"
#include "hk/geodesic.hpp"
#include "hk/tolerances.hpp"

namespace hk {

namespace {
constexpr double kPi     = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

void push(SuiteResult& res, const std::string& name, double worst, double tolv) {
    res.rows.push_back({name, worst, tolv, worst <= tolv});
}
} // namespace

bool SuiteResult::all_pass() const {
    return std::ranges::all_of(rows, [](const CheckRow& r) { return r.pass; });
}

const std::vector<std::string>& verify_suite_names() {
    static const std::vector<std::string> names{
        "metric", "mass", "cone", "limits", "reservoir", "charfn", "semiconcavity"};
    return names;
}

DiscreteMeasure random_measure(std::mt19937_64& rng, int dim, int max_atoms, double box,
                               double mass_lo, double mass_hi) {
    std::uniform_int_distribution<int> count(1, max_atoms);
    std::uniform_real_distribution<double> pos(0.0, box);
    std::uniform_real_distribution<double> mass(mass_lo, mass_hi);
    DiscreteMeasure mu(dim);
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        Vec x(dim);
        for (int k = 0; k < dim; ++k) x[k] = pos(rng);
        mu.add(std::move(x), mass(rng));
    }
    return mu.merged(0.0);
}

ConePoint random_cone_point(std::mt19937_64& rng, int dim, double box, double r_hi) {
    std::uniform_real_distribution<double> pos(0.0, box);
    std::uniform_real_distribution<double> rad(0.05, r_hi);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < 0.12) return ConePoint::tip();
    Vec x(dim);
    for (int k = 0; k < dim; ++k) x[k] = pos(rng);
    return ConePoint::at(std::move(x), rad(rng));
}

namespace {

SuiteResult suite_cone(std::uint64_t seed) {
    SuiteResult res{"cone", {}};
    std::mt19937_64 rng(seed ^ 0xc04eULL);
    std::uniform_real_distribution<double> ab(0.3, 4.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    double sym = 0.0, tri = 0.0, tipd = 0.0, speed = 0.0, repar = 0.0;
    for (int it = 0; it < 300; ++it) {
        const Params p{ab(rng), ab(rng)};
        const ConePoint a = random_cone_point(rng, 2, 4.0);
        const ConePoint b = random_cone_point(rng, 2, 4.0);
        const ConePoint c = random_cone_point(rng, 2, 4.0);
        sym = std::max(sym, std::abs(cone_dist(a, b, p) - cone_dist(b, a, p)));
        tri = std::max(tri, cone_dist(a, c, p) - cone_dist(a, b, p) - cone_dist(b, c, p));
        tipd = std::max(tipd, std::abs(cone_dist(a, ConePoint::tip(), p) -
                                       std::sqrt(4.0 / p.beta) * a.r()));
        double s = unit(rng), t = unit(rng);
        if (s > t) std::swap(s, t);
        const ConeGeodesicSample zs = cone_geodesic(s, a, b, p);
        const ConeGeodesicSample zt = cone_geodesic(t, a, b, p);
        speed = std::max(speed, std::abs(cone_dist(zs.z, zt.z, p) -
                                         (t - s) * cone_dist(a, b, p)));

        const double L  = 3.0 * unit(rng);
        const double a0 = 0.2 + 2.0 * unit(rng);
        const double a1 = 0.2 + 2.0 * unit(rng);
        const double th = p.beta / 4.0;
        repar = std::max(
            repar, std::abs(one_mass_point_cost(L * L, a0, a1, p) -
                            one_mass_point_cost(th * L * L / p.alpha, a0, a1,
                                                {1.0, p.beta / th}) /
                                th));
    }
    push(res, "cone_dist symmetry", sym, 0.0);
    push(res, "triangle inequality", tri, tol::eq_tol);
    push(res, "tip distance sqrt(4/beta) r", tipd, tol::eq_tol);
    push(res, "geodesic constant speed", speed, 1e-10);
    push(res, "one-mass-point rescaling", repar, tol::eq_tol);

    // Quadrature convergence: error shrinks ~4x when h halves.
    auto quad_err = [](int n) {
        const double L = 1.0, a0 = 1.0, a1 = 2.0;
        std::vector<double> a(n), r(n);
        for (int i = 0; i < n; ++i) {
            const auto smp = one_mass_point_curve(i / double(n - 1), L, a0, a1);
            a[i] = smp.a;
            r[i] = smp.rho;
        }
        return std::abs(curve_length_1mp(a, r, L, {1.0, 4.0}) -
                        one_mass_point_cost(L * L, a0, a1, {1.0, 4.0}));
    };
    const double ratio = quad_err(2001) / quad_err(4001);
    push(res, "quadrature order (err ratio ~4)", std::abs(ratio - 4.0), 1.5);
    return res;
}

SuiteResult suite_mass(std::uint64_t seed) {
    SuiteResult res{"mass", {}};
    std::mt19937_64 rng(seed ^ 0x3a55ULL);
    SolverConfig cfg;

    double ident = 0.0, bound_lo = 0.0, bound_hi = 0.0, conv = 0.0;
    bool all_converged = true;
    for (int it = 0; it < 20; ++it) {
        const DiscreteMeasure mu0 = random_measure(rng, 2, 4);
        const DiscreteMeasure mu1 = random_measure(rng, 2, 4);
        const EtReport rep        = solve_et(mu0, mu1, {1.0, 4.0}, cfg);
        all_converged             = all_converged && rep.converged;
        const LiftResult lift     = hk_via_lifts(mu0, mu1, rep, {1.0, 4.0});
        const GeodesicCurve curve = geodesic_from_plan(lift.plan, {1.0, 4.0});
        const MassProfile prof    = mass_profile(curve);
        ident                     = std::max(ident, prof.worst_deviation);

        for (int k = 0; k <= 20; ++k) {
            const double s = k / 20.0;
            const double m = curve.eval(s).total_mass();
            bound_lo = std::max(bound_lo,
                                prof.m0 * prof.m1 / (prof.m0 + prof.m1) - m);
            const double hi = (1.0 - s) * std::sqrt(prof.m0) + s * std::sqrt(prof.m1);
            bound_hi = std::max(bound_hi, m - hi * hi);
        }
        conv = std::max(conv, std::abs(lambda_convexity_check(
                                  [](const Vec&) { return 1.0; }, curve, 2.0,
                                  {0.1, 0.25, 0.5, 0.75, 0.9})));
    }
    push(res, "solver converged", all_converged ? 0.0 : 1.0, 0.0);
    push(res, "mass identity residual", ident, 1e-10);
    push(res, "mass lower bound", bound_lo, tol::eq_tol);
    push(res, "mass upper bound", bound_hi, tol::eq_tol);
    push(res, "mass is exactly 2-convex", conv, 1e-10);
    return res;
}

SuiteResult suite_metric(std::uint64_t seed) {
    SuiteResult res{"metric", {}};
    std::mt19937_64 rng(seed ^ 0x713cULL);
    SolverConfig cfg;

    double sym = 0.0, tri = 0.0;
    bool all_converged = true;
    for (int it = 0; it < 200; ++it) {
        const DiscreteMeasure a = random_measure(rng, 2, 4);
        const DiscreteMeasure b = random_measure(rng, 2, 4);
        const DiscreteMeasure c = random_measure(rng, 2, 4);
        const HkResult ab       = hk_distance(a, b, {1.0, 4.0}, cfg);
        const HkResult ba       = hk_distance(b, a, {1.0, 4.0}, cfg);
        const HkResult bc       = hk_distance(b, c, {1.0, 4.0}, cfg);
        const HkResult ac       = hk_distance(a, c, {1.0, 4.0}, cfg);
        all_converged = all_converged && ab.report.converged && ba.report.converged &&
                        bc.report.converged && ac.report.converged;
        sym = std::max(sym, std::abs(ab.hk - ba.hk));
        tri = std::max(tri, ac.hk - ab.hk - bc.hk);
    }
    push(res, "solver converged", all_converged ? 0.0 : 1.0, 0.0);
    push(res, "hk symmetry", sym, 1e-6);
    push(res, "hk triangle inequality", tri, 2e-6);
    return res;
}

SuiteResult suite_limits(std::uint64_t seed) {
    SuiteResult res{"limits", {}};
    std::mt19937_64 rng(seed ^ 0x11a1ULL);

    // Two-Dirac beta sequence toward the Wasserstein target.
    {
        DiscreteMeasure mu0(2), mu1(2);
        mu0.add({0.0, 0.0}, 1.0);
        mu1.add({0.1, 0.0}, 1.0);
        const LimitReport rep =
            wasserstein_limit_check(mu0, mu1, {1.0, 0.1, 0.01, 0.001});
        bool monotone = true;
        for (std::size_t i = 1; i < rep.deviations.size(); ++i)
            monotone = monotone && rep.deviations[i] <= rep.deviations[i - 1] + 1e-15;
        push(res, "beta-limit deviations monotone", monotone ? 0.0 : 1.0, 0.0);
        push(res, "beta-limit final deviation", rep.deviations.back(), 1e-2);
    }
    // Equal-weight Wasserstein target vs permutation enumeration.
    {
        std::uniform_real_distribution<double> pos(0.0, 1.5);
        double worst = 0.0;
        for (int rep_i = 0; rep_i < 5; ++rep_i) {
            const int n = 4;
            DiscreteMeasure mu0(2), mu1(2);
            std::vector<Vec> xs, ys;
            for (int i = 0; i < n; ++i) {
                xs.push_back({pos(rng), pos(rng)});
                ys.push_back({pos(rng), pos(rng)});
                mu0.add(xs.back(), 1.0);
                mu1.add(ys.back(), 1.0);
            }
            std::vector<int> perm(n);
            for (int i = 0; i < n; ++i) perm[i] = i;
            double best = std::numeric_limits<double>::infinity();
            do {
                double c = 0.0;
                for (int i = 0; i < n; ++i) c += sq_dist(xs[i], ys[perm[i]]);
                best = std::min(best, c);
            } while (std::next_permutation(perm.begin(), perm.end()));
            // unit weights: target = sqrt(|mu0|) W2(normalized) = sqrt(best)
            const double target_oracle = std::sqrt(best);
            const LimitReport rep = wasserstein_limit_check(mu0, mu1, {1.0});
            worst = std::max(worst, std::abs(rep.target - target_oracle));
        }
        push(res, "wasserstein target vs permutations", worst, tol::eq_tol);
    }
    // Random 3-atom alpha sequence toward the Hellinger target.
    {
        double final_dev = 0.0, trend = 0.0;
        for (int rep_i = 0; rep_i < 5; ++rep_i) {
            const DiscreteMeasure mu0 = random_measure(rng, 2, 3);
            const DiscreteMeasure mu1 = random_measure(rng, 2, 3);
            const LimitReport rep =
                hellinger_limit_check(mu0, mu1, {1.0, 1e-2, 1e-4, 1e-6});
            final_dev = std::max(final_dev, rep.deviations.back());
            trend     = std::max(trend, rep.deviations.back() - rep.deviations.front());
        }
        push(res, "alpha-limit final deviation", final_dev, 1e-3);
        push(res, "alpha-limit trend (last <= first)", trend, 0.0);
    }
    return res;
}

SuiteResult suite_reservoir(std::uint64_t seed) {
    SuiteResult res{"reservoir", {}};
    std::mt19937_64 rng(seed ^ 0x5e5eULL);
    std::uniform_real_distribution<double> wdist(0.2, 2.0);

    double pad_change = 0.0, long_mass = 0.0, lift_long = 0.0;
    for (int it = 0; it < 25; ++it) {
        // Equal-total cone measures.
        ConeMeasure lam0, lam1;
        const int n0 = 1 + static_cast<int>(rng() % 4);
        const int n1 = 1 + static_cast<int>(rng() % 4);
        double t0 = 0.0, t1 = 0.0;
        for (int i = 0; i < n0; ++i) {
            const double w = wdist(rng);
            lam0.add(random_cone_point(rng, 2, 3.5), w);
            t0 += w;
        }
        for (int i = 0; i < n1; ++i) {
            const double w = wdist(rng);
            lam1.add(random_cone_point(rng, 2, 3.5), w);
            t1 += w;
        }
        for (auto& a : lam1.atoms) a.w *= t0 / t1;

        const Params p{1.0, 4.0};
        const ConeOtResult at_star = reservoir_distance(lam0, lam1, p);
        const double kappa = reservoir_kappa(lam0, lam1);
        ConeMeasure a = lam0, b = lam1;
        a.add(ConePoint::tip(), kappa + 1.0);
        b.add(ConePoint::tip(), kappa + 1.0);
        const ConeOtResult padded = wasserstein_cone(a, b, p);
        pad_change = std::max(pad_change, std::abs(padded.value - at_star.value));
        long_mass  = std::max(long_mass, check_no_long_transport(at_star.plan, p));
    }
    SolverConfig cfg;
    for (int it = 0; it < 15; ++it) {
        const DiscreteMeasure mu0 = random_measure(rng, 2, 4);
        const DiscreteMeasure mu1 = random_measure(rng, 2, 4);
        const EtReport rep        = solve_et(mu0, mu1, {1.0, 4.0}, cfg);
        const LiftResult lift     = hk_via_lifts(mu0, mu1, rep, {1.0, 4.0});
        lift_long = std::max(lift_long,
                             check_no_long_transport(lift.plan, {1.0, 4.0}, 1e-9));
    }
    push(res, "padding beyond kappa* is free", pad_change, 1e-10);
    push(res, "no long transport (LP plans)", long_mass, tol::eq_tol);
    push(res, "no long transport (lift plans)", lift_long, tol::eq_tol);
    return res;
}

SuiteResult suite_charfn(std::uint64_t seed) {
    (void)seed; // fixed instance
    SuiteResult res{"charfn", {}};
    const CharGeodesic cg = char_function_geodesic();
    push(res, "w* vs 0.4895", std::abs(cg.w_star - 0.4895), 1e-3);
    push(res, "c* vs 1.0634", std::abs(cg.c_star - 1.0634), 1e-3);
    push(res, "boundary h(0) = pi/2", std::abs(cg.h_at(0.0) - kHalfPi), 1e-10);
    push(res, "boundary h(pi/4) = 3pi/4", std::abs(cg.h_at(kPi / 4.0) - 3.0 * kPi / 4.0),
         1e-10);

    double viol = 0.0, comp = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double x   = kPi / 4.0 * i / 199.0;
        const double r0  = cg.rho0_at(x);
        const double hx  = cg.h_at(x);
        const double eq  = r0 * cg.rho1_at(hx) - std::pow(std::cos(hx - x), 2);
        comp             = std::max(comp, std::abs(eq));
        for (int j = 0; j < 200; ++j) {
            const double y = kHalfPi + kPi / 4.0 * j / 199.0;
            const double rhs = std::pow(cos_trunc(y - x, kHalfPi), 2);
            viol = std::max(viol, rhs - r0 * cg.rho1_at(y));
        }
    }
    push(res, "optimality inequality on 200x200 grid", viol, 1e-6);
    push(res, "equality along the map h", comp, 1e-6);
    push(res, "marginal consistency through h", cg.marginal_mismatch, 1e-8);
    return res;
}

SuiteResult suite_semiconcavity(std::uint64_t seed) {
    (void)seed; // fixed grid
    SuiteResult res{"semiconcavity", {}};
    double phi_min = std::numeric_limits<double>::infinity();
    for (double y : {0.1, 0.5, 1.0, 1.3})
        phi_min = std::min(phi_min, semiconcavity_witness(1.0, y).phi);
    push(res, "phi positive on the witness offsets", phi_min > 0.0 ? 0.0 : 1.0, 0.0);

    double agree = 0.0;
    for (double b : {0.5, 1.0, 4.0, 25.0})
        for (double y : {0.3, 0.7, 1.2}) {
            const SemiconcavityWitness w = semiconcavity_witness(b, y);
            agree = std::max(agree, std::abs(w.k_lower - w.solver_k));
        }
    push(res, "closed form vs solver quotient", agree, 5.0 * tol::solver_tol);

    const double k_small = semiconcavity_witness(1.0, 0.5).k_lower;
    const double k_large = semiconcavity_witness(1e6, 0.5).k_lower;
    push(res, "k_lower unbounded in b (b = 1e6)",
         (k_large > 50.0 && k_large > 10.0 * k_small) ? 0.0 : 1.0, 0.0);
    return res;
}

} // namespace

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
    if (name == "cone") return suite_cone(seed);
    if (name == "mass") return suite_mass(seed);
    if (name == "metric") return suite_metric(seed);
    if (name == "limits") return suite_limits(seed);
    if (name == "reservoir") return suite_reservoir(seed);
    if (name == "charfn") return suite_charfn(seed);
    if (name == "semiconcavity") return suite_semiconcavity(seed);
    throw std::invalid_argument("unknown verify suite: " + name);
}

std::vector<SuiteResult> run_all_suites(std::uint64_t seed) {
    std::vector<SuiteResult> out;
    for (const auto& name : verify_suite_names()) out.push_back(run_suite(name, seed));
    return out;
}

} // namespace hk
