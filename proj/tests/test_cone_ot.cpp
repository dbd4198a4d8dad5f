#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hk/cone_ot.hpp"
#include "hk/tolerances.hpp"
#include "hk/verify.hpp"

using namespace hk;

namespace {
constexpr double kPi = std::numbers::pi;

DiscreteMeasure dirac(Vec x, double m) {
    DiscreteMeasure mu(static_cast<int>(x.size()));
    mu.add(std::move(x), m);
    return mu;
}
} // namespace

TEST_CASE("transport_lp against permutation enumeration") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> pos(-2.0, 2.0);
    for (int n = 2; n <= 6; ++n) {
        for (int rep = 0; rep < 8; ++rep) {
            std::vector<Vec> xs(n), ys(n);
            for (auto& x : xs) x = {pos(rng), pos(rng)};
            for (auto& y : ys) y = {pos(rng), pos(rng)};
            std::vector<double> supply(n, 1.0), demand(n, 1.0),
                cost(static_cast<std::size_t>(n) * n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    cost[static_cast<std::size_t>(i) * n + j] = sq_dist(xs[i], ys[j]);

            std::vector<int> perm(n);
            for (int i = 0; i < n; ++i) perm[i] = i;
            double best = std::numeric_limits<double>::infinity();
            do {
                double c = 0.0;
                for (int i = 0; i < n; ++i)
                    c += cost[static_cast<std::size_t>(i) * n + perm[i]];
                best = std::min(best, c);
            } while (std::next_permutation(perm.begin(), perm.end()));

            const TransportSolution sol = transport_lp(supply, demand, cost);
            CHECK(sol.value == doctest::Approx(best).epsilon(1e-12));
        }
    }
}

TEST_CASE("wasserstein_cone against permutation enumeration") {
    std::mt19937_64 rng(131);
    const Params p{1.0, 4.0};
    for (int n = 2; n <= 6; ++n) {
        for (int rep = 0; rep < 5; ++rep) {
            ConeMeasure lam0, lam1;
            std::vector<ConePoint> zs, ws;
            for (int i = 0; i < n; ++i) {
                zs.push_back(random_cone_point(rng, 2, 3.0));
                ws.push_back(random_cone_point(rng, 2, 3.0));
                lam0.add(zs.back(), 1.0);
                lam1.add(ws.back(), 1.0);
            }
            std::vector<int> perm(n);
            for (int i = 0; i < n; ++i) perm[i] = i;
            double best = std::numeric_limits<double>::infinity();
            do {
                double c = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double d = cone_dist(zs[i], ws[perm[i]], p);
                    c += d * d;
                }
                best = std::min(best, c);
            } while (std::next_permutation(perm.begin(), perm.end()));
            // canonical() may merge tip atoms, so solve on the raw inputs
            CHECK(wasserstein_cone(lam0, lam1, p).value ==
                  doctest::Approx(best).epsilon(1e-12));
        }
    }
}

TEST_CASE("transport_lp on a generic rectangular instance") {
    // supplies (2,1), demands (1,1,1): optimum pairs each demand with its
    // cheapest compatible source.
    const std::vector<double> supply{2.0, 1.0};
    const std::vector<double> demand{1.0, 1.0, 1.0};
    const std::vector<double> cost{0.0, 1.0, 4.0,
                                   3.0, 1.0, 0.5};
    const TransportSolution sol = transport_lp(supply, demand, cost);
    CHECK(sol.value == doctest::Approx(1.5));
}

TEST_CASE("wasserstein_cone") {
    const Params p{1.0, 4.0};

    SUBCASE("identical measures cost zero with the identity plan") {
        ConeMeasure lam;
        lam.add(ConePoint::at({0.0}, 1.0), 1.0);
        lam.add(ConePoint::at({1.0}, 0.5), 2.0);
        const ConeOtResult res = wasserstein_cone(lam, lam, p);
        CHECK(res.balanced);
        CHECK(res.value == doctest::Approx(0.0));
    }
    SUBCASE("single pair at right angle") {
        ConeMeasure a, b;
        a.add(ConePoint::at({0.0}, 1.0), 1.0);
        b.add(ConePoint::at({kPi / 2.0}, 1.0), 1.0);
        CHECK(wasserstein_cone(a, b, p).value == doctest::Approx(2.0));
    }
    SUBCASE("unequal masses are infinitely far") {
        ConeMeasure a, b;
        a.add(ConePoint::at({0.0}, 1.0), 1.0);
        b.add(ConePoint::at({0.0}, 1.0), 2.0);
        const ConeOtResult res = wasserstein_cone(a, b, p);
        CHECK(!res.balanced);
        CHECK(std::isinf(res.value));
    }
}

TEST_CASE("reservoir_kappa") {
    ConeMeasure a, b;
    a.add(ConePoint::at({0.0}, 1.0), 1.0);
    b.add(ConePoint::at({1.0}, 1.0), 1.0);
    CHECK(reservoir_kappa(a, b) == doctest::Approx(1.0));

    ConeMeasure c, d;
    c.add(ConePoint::tip(), 5.0);
    c.add(ConePoint::at({0.0}, 1.0), 1.0);
    d.add(ConePoint::tip(), 5.0);
    d.add(ConePoint::at({1.0}, 1.0), 1.0);
    CHECK(reservoir_kappa(c, d) == 0.0); // rho_j >= theta_i on both sides

    ConeMeasure e, f;
    e.add(ConePoint::at({0.0}, 1.0), 2.0);
    f.add(ConePoint::tip(), 3.0);
    CHECK(reservoir_kappa(e, f) == 0.0);
}

TEST_CASE("reservoir_distance") {
    const Params p{1.0, 4.0};
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> mass(0.2, 2.0);
    std::uniform_real_distribution<double> Ld(0.05, 1.4);

    SUBCASE("padded two-Dirac instance reproduces the closed form") {
        for (int it = 0; it < 30; ++it) {
            const double a0 = mass(rng), a1 = mass(rng), L = Ld(rng);
            ConeMeasure lam0, lam1;
            lam0.add(ConePoint::at({0.0}, std::sqrt(a0)), 1.0);
            lam1.add(ConePoint::at({L}, std::sqrt(a1)), 1.0);
            const double expect = a0 + a1 - 2.0 * std::sqrt(a0 * a1) * std::cos(L);
            CHECK(reservoir_distance(lam0, lam1, p).value ==
                  doctest::Approx(expect).epsilon(1e-12));
        }
    }
    SUBCASE("identical measures") {
        ConeMeasure lam;
        lam.add(ConePoint::at({0.3}, 1.2), 0.7);
        CHECK(reservoir_distance(lam, lam, p).value == doctest::Approx(0.0));
    }
    SUBCASE("padding beyond kappa* changes nothing") {
        for (int it = 0; it < 20; ++it) {
            ConeMeasure lam0, lam1;
            const int n0 = 1 + static_cast<int>(rng() % 3);
            const int n1 = 1 + static_cast<int>(rng() % 3);
            double t0 = 0.0, t1 = 0.0;
            for (int i = 0; i < n0; ++i) {
                const double w = mass(rng);
                lam0.add(random_cone_point(rng, 1, 3.0), w);
                t0 += w;
            }
            for (int i = 0; i < n1; ++i) {
                const double w = mass(rng);
                lam1.add(random_cone_point(rng, 1, 3.0), w);
                t1 += w;
            }
            for (auto& at : lam1.atoms) at.w *= t0 / t1;

            const double kappa     = reservoir_kappa(lam0, lam1);
            const ConeOtResult ref = reservoir_distance(lam0, lam1, p);
            ConeMeasure a = lam0, b = lam1;
            a.add(ConePoint::tip(), kappa + 1.0);
            b.add(ConePoint::tip(), kappa + 1.0);
            CHECK(wasserstein_cone(a, b, p).value ==
                  doctest::Approx(ref.value).epsilon(1e-10));
            CHECK(check_no_long_transport(ref.plan, p) <= tol::eq_tol);
        }
    }
}

TEST_CASE("check_no_long_transport") {
    const Params p{1.0, 4.0};
    ConePlan plan;
    plan.add(ConePoint::at({0.0}, 1.0), ConePoint::at({2.0}, 1.0), 0.5); // > pi/2
    CHECK(check_no_long_transport(plan, p) == doctest::Approx(0.5));

    ConePlan tips;
    tips.add(ConePoint::at({0.0}, 1.0), ConePoint::tip(), 0.5);
    CHECK(check_no_long_transport(tips, p) == 0.0);

    // scaled threshold: same positions, stiffer transport weight
    CHECK(check_no_long_transport(plan, {8.0, 4.0}) == 0.0); // ell = 2 / sqrt(8) < pi/2
}

TEST_CASE("hk_via_lifts") {
    SolverConfig cfg;
    const Params p{1.0, 4.0};

    SUBCASE("two Diracs below the threshold: one transport pair") {
        DiscreteMeasure mu0 = dirac({0.0}, 1.0);
        DiscreteMeasure mu1 = dirac({1.0}, 2.0);
        const EtReport rep  = solve_et(mu0, mu1, p, cfg);
        const LiftResult lr = hk_via_lifts(mu0, mu1, rep, p);
        REQUIRE(lr.plan.entries.size() == 1);
        CHECK(!lr.plan.entries[0].z0.is_tip());
        CHECK(!lr.plan.entries[0].z1.is_tip());
        CHECK(lr.value ==
              doctest::Approx(1.0 + 2.0 - 2.0 * std::sqrt(2.0) * std::cos(1.0))
                  .epsilon(1e-7));
    }
    SUBCASE("far Diracs: two pure tip pairs") {
        DiscreteMeasure mu0 = dirac({0.0}, 1.0);
        DiscreteMeasure mu1 = dirac({2.0}, 2.0);
        const EtReport rep  = solve_et(mu0, mu1, p, cfg);
        const LiftResult lr = hk_via_lifts(mu0, mu1, rep, p);
        REQUIRE(lr.plan.entries.size() == 2);
        CHECK(lr.value == doctest::Approx(3.0));
        for (const auto& e : lr.plan.entries)
            CHECK((e.z0.is_tip() || e.z1.is_tip()));
    }
    SUBCASE("lift cost, ET value and the exact LP all agree") {
        std::mt19937_64 rng(59);
        for (int it = 0; it < 30; ++it) {
            const DiscreteMeasure mu0 = random_measure(rng, 2, 5);
            const DiscreteMeasure mu1 = random_measure(rng, 2, 5);
            const EtReport rep        = solve_et(mu0, mu1, p, cfg);
            REQUIRE(rep.converged);
            const LiftResult lr = hk_via_lifts(mu0, mu1, rep, p);
            CHECK(std::abs(lr.value - rep.value) <= 2.0 * tol::solver_tol);

            // the constructed lifts are optimal: the LP on their marginals
            // cannot do better, and the plan cannot beat the LP
            const ConeOtResult lp =
                wasserstein_cone(lr.plan.marginal0(), lr.plan.marginal1(), p);
            CHECK(lp.value <= lr.value + 1e-9);
            CHECK(lp.value == doctest::Approx(rep.value).epsilon(5e-6));
            CHECK(check_no_long_transport(lp.plan, p, 1e-9) <= tol::eq_tol);
        }
    }
    SUBCASE("value invariant under projection-preserving dilation of the lifts") {
        std::mt19937_64 rng(61);
        std::uniform_real_distribution<double> th(0.4, 2.5);
        for (int it = 0; it < 10; ++it) {
            const DiscreteMeasure mu0 = random_measure(rng, 2, 3);
            const DiscreteMeasure mu1 = random_measure(rng, 2, 3);
            const EtReport rep        = solve_et(mu0, mu1, p, cfg);
            const LiftResult lr       = hk_via_lifts(mu0, mu1, rep, p);
            const double factor       = th(rng);
            const ConePlan dil =
                dilate_plan(lr.plan, [&](const auto&) { return factor; });
            const ConeOtResult lp =
                wasserstein_cone(dil.marginal0(), dil.marginal1(), p);
            CHECK(lp.value == doctest::Approx(rep.value).epsilon(5e-6));
        }
    }
    SUBCASE("mismatched report is rejected") {
        DiscreteMeasure mu0 = dirac({0.0}, 1.0);
        DiscreteMeasure mu1 = dirac({1.0}, 2.0);
        const EtReport rep  = solve_et(mu0, mu1, p, cfg);
        DiscreteMeasure other(1);
        other.add({0.0}, 1.0);
        other.add({0.5}, 1.0);
        CHECK_THROWS_AS(hk_via_lifts(other, mu1, rep, p), std::invalid_argument);
    }
}

TEST_CASE("transport_lp handles a moderately large dense instance") {
    std::mt19937_64 rng(67);
    std::uniform_real_distribution<double> pos(-3.0, 3.0);
    std::uniform_real_distribution<double> w(0.1, 1.0);
    const int n = 60, m = 55;
    std::vector<double> supply(n), demand(m), cost(static_cast<std::size_t>(n) * m);
    double ts = 0.0, td = 0.0;
    std::vector<Vec> xs(n), ys(m);
    for (int i = 0; i < n; ++i) {
        xs[i]     = {pos(rng), pos(rng)};
        supply[i] = w(rng);
        ts += supply[i];
    }
    for (int j = 0; j < m; ++j) {
        ys[j]     = {pos(rng), pos(rng)};
        demand[j] = w(rng);
        td += demand[j];
    }
    for (double& d : demand) d *= ts / td;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            cost[static_cast<std::size_t>(i) * m + j] = sq_dist(xs[i], ys[j]);
    const TransportSolution sol = transport_lp(supply, demand, cost);
    CHECK(sol.value > 0.0);

    // marginal feasibility: per-row and per-column flow sums match exactly
    // up to float accumulation
    std::vector<double> row(n, 0.0), col(m, 0.0);
    for (const auto& [i, j, g] : sol.flows) {
        row[i] += g;
        col[j] += g;
    }
    for (int i = 0; i < n; ++i)
        CHECK(row[i] == doctest::Approx(supply[i]).epsilon(1e-12));
    for (int j = 0; j < m; ++j)
        CHECK(col[j] == doctest::Approx(demand[j]).epsilon(1e-12));
}
