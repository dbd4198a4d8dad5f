#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hk/geometry.hpp"
#include "hk/tolerances.hpp"

using namespace hk;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent oracle: discretized minimization of the action
//   int_0^1 L^2 b^2 rho_dot^2 + b_dot^2 ds     (b = sqrt(a), (1,4) weights)
// with fixed endpoints, alternating exact subproblem solves. The rho-step is
// the harmonic-mean flow; the b-step solves the tridiagonal normal equations.
struct ActionOracle {
    std::vector<double> b, rho;
    double value = 0.0;

    ActionOracle(double L, double a0, double a1, int n = 2000) {
        const double h  = 1.0 / n;
        const double b0 = std::sqrt(a0), b1 = std::sqrt(a1);
        b.resize(n + 1);
        rho.resize(n + 1);
        for (int i = 0; i <= n; ++i) {
            const double s = i * h;
            b[i]   = (1.0 - s) * b0 + s * b1;
            rho[i] = s;
        }
        std::vector<double> A(n), diag(n + 1), rhs(n + 1), scratch(n + 1);
        for (int pass = 0; pass < 4000; ++pass) {
            // rho-step: increments proportional to 1 / b_mid^2
            double tot = 0.0;
            for (int i = 0; i < n; ++i) {
                const double bm = 0.5 * (b[i] + b[i + 1]);
                scratch[i] = 1.0 / std::max(bm * bm, 1e-12);
                tot += scratch[i];
            }
            rho[0] = 0.0;
            for (int i = 0; i < n; ++i) rho[i + 1] = rho[i] + scratch[i] / tot;

            // b-step: minimize sum A_i (b_i + b_{i+1})^2 + (1/h)(b_{i+1}-b_i)^2
            const double B = 1.0 / h;
            for (int i = 0; i < n; ++i) {
                const double dr = (rho[i + 1] - rho[i]) / h;
                A[i] = h * L * L * dr * dr / 4.0;
            }
            for (int j = 1; j < n; ++j) {
                diag[j] = A[j - 1] + A[j] + 2.0 * B;
                rhs[j]  = 0.0;
            }
            rhs[1] -= (A[0] - B) * b0;
            rhs[n - 1] -= (A[n - 1] - B) * b1;
            // Thomas elimination over interior unknowns; sub_j = A_{j-1} - B,
            // sup_j = A_j - B.
            for (int j = 2; j < n; ++j) {
                const double f = (A[j - 1] - B) / diag[j - 1];
                diag[j] -= f * (A[j - 1] - B);
                rhs[j] -= f * rhs[j - 1];
            }
            double delta = 0.0;
            std::vector<double> nb = b;
            for (int j = n - 1; j >= 1; --j) {
                double r = rhs[j];
                if (j < n - 1) r -= (A[j] - B) * nb[j + 1];
                nb[j] = r / diag[j];
            }
            for (int i = 0; i <= n; ++i) delta = std::max(delta, std::abs(nb[i] - b[i]));
            b = nb;
            if (delta < 1e-13) break;
        }
        for (int i = 0; i < n; ++i) {
            const double bm = 0.5 * (b[i] + b[i + 1]);
            const double dr = (rho[i + 1] - rho[i]) / h;
            const double db = (b[i + 1] - b[i]) / h;
            value += h * (L * L * bm * bm * dr * dr + db * db);
        }
    }

    double mass_at(double s) const {
        const auto i = static_cast<std::size_t>(std::lround(s * (b.size() - 1)));
        return b[i] * b[i];
    }
};

} // namespace

TEST_CASE("cos_trunc") {
    CHECK(cos_trunc(0.0, kPi) == doctest::Approx(1.0));
    CHECK(cos_trunc(4.0, kPi) == doctest::Approx(-1.0)); // truncated at pi
    CHECK(cos_trunc(2.0, kPi / 2.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(cos_trunc(-0.3, kPi) == doctest::Approx(std::cos(0.3)));
}

TEST_CASE("cone_dist closed forms") {
    const Params p{1.0, 4.0};
    const ConePoint z0 = ConePoint::at({0.0}, 1.0);
    CHECK(cone_dist(z0, ConePoint::tip(), p) == doctest::Approx(1.0));

    const ConePoint z1 = ConePoint::at({kPi}, 1.0);
    CHECK(cone_dist(z0, z1, p) == doctest::Approx(2.0));

    // beta = 0 branch: pure transport, equal radii
    const Params ptr{1.0, 0.0};
    const ConePoint w1 = ConePoint::at({1.3}, 1.0);
    CHECK(cone_dist(z0, w1, ptr) == doctest::Approx(1.3));
    const ConePoint w2 = ConePoint::at({1.3}, 2.0);
    CHECK(std::isinf(cone_dist(z0, w2, ptr)));

    // alpha = 0: Hellinger arc at L = 0, +inf otherwise
    const Params ph{0.0, 4.0};
    CHECK(cone_dist(ConePoint::at({0.5}, 2.0), ConePoint::at({0.5}, 3.0), ph) ==
          doctest::Approx(1.0));
    CHECK(std::isinf(cone_dist(z0, w1, ph)));

    // tips are one point
    CHECK(cone_dist(ConePoint::tip(), ConePoint::tip(), p) == 0.0);
    CHECK(ConePoint::tip() == ConePoint::at({7.0}, 0.0));
}

TEST_CASE("cone_dist symmetry and triangle inequality") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pos(-2.0, 2.0);
    std::uniform_real_distribution<double> rad(0.0, 2.0);
    std::uniform_real_distribution<double> ab(0.2, 5.0);
    for (int it = 0; it < 500; ++it) {
        const Params p{ab(rng), ab(rng)};
        auto pt = [&] {
            const double r = rad(rng);
            return r < 0.08 ? ConePoint::tip() : ConePoint::at({pos(rng), pos(rng)}, r);
        };
        const ConePoint a = pt(), b = pt(), c = pt();
        CHECK(cone_dist(a, b, p) == cone_dist(b, a, p));
        CHECK(cone_dist(a, c, p) <= cone_dist(a, b, p) + cone_dist(b, c, p) + tol::eq_tol);
    }
}

TEST_CASE("cone_geodesic endpoints and tie-break") {
    const ConePoint z0 = ConePoint::at({0.0, 0.0}, 1.5);
    const ConePoint z1 = ConePoint::at({1.0, 1.0}, 0.7);
    const auto s0 = cone_geodesic(0.0, z0, z1);
    const auto s1 = cone_geodesic(1.0, z0, z1);
    CHECK(s0.z == z0);
    CHECK(s0.rho == 0.0);
    CHECK(s1.z == z1);
    CHECK(s1.rho == 1.0);
    CHECK(s0.r_sq == doctest::Approx(z0.r() * z0.r()));

    // |x1-x0| >= pi goes through the tip; rho jumps 0 -> 1 at the crossing
    const ConePoint far0 = ConePoint::at({0.0}, 1.0);
    const ConePoint far1 = ConePoint::at({3.5}, 1.0);
    CHECK(cone_geodesic(0.2, far0, far1).rho == 0.0);
    CHECK(cone_geodesic(0.8, far0, far1).rho == 1.0);
    const auto mid = cone_geodesic(0.5, far0, far1); // (1-s) r0 = s r1: the tip
    CHECK(mid.z.is_tip());
    CHECK(mid.rho == 1.0); // sign(0) := +1
}

TEST_CASE("cone_geodesic midpoint radius at right angle") {
    // z_i = [x_i, 1] with |x1-x0| = pi/2: cross term vanishes, R^2(1/2) = 1/2.
    const ConePoint z0 = ConePoint::at({0.0}, 1.0);
    const ConePoint z1 = ConePoint::at({kPi / 2.0}, 1.0);
    CHECK(cone_geodesic(0.5, z0, z1).r_sq == doctest::Approx(0.5).epsilon(1e-12));

    const ActionOracle oracle(kPi / 2.0, 1.0, 1.0);
    CHECK(oracle.mass_at(0.5) == doctest::Approx(0.5).epsilon(2e-3));
}

TEST_CASE("cone_geodesic constant speed") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pos(-3.0, 3.0);
    std::uniform_real_distribution<double> rad(0.05, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> ab(0.3, 4.0);
    for (int it = 0; it < 400; ++it) {
        const Params p{ab(rng), ab(rng)};
        const ConePoint z0 = ConePoint::at({pos(rng), pos(rng)}, rad(rng));
        const ConePoint z1 = ConePoint::at({pos(rng), pos(rng)}, rad(rng));
        double s = unit(rng), t = unit(rng);
        if (s > t) std::swap(s, t);
        const auto zs = cone_geodesic(s, z0, z1, p);
        const auto zt = cone_geodesic(t, z0, z1, p);
        CHECK(cone_dist(zs.z, zt.z, p) ==
              doctest::Approx((t - s) * cone_dist(z0, z1, p)).epsilon(1e-10));
    }
}

TEST_CASE("tip geodesics stay on the surviving ray") {
    const ConePoint z1 = ConePoint::at({2.0, -1.0}, 1.4);
    for (double s : {0.25, 0.5, 0.75}) {
        const auto zs = cone_geodesic(s, ConePoint::tip(), z1);
        CHECK(zs.z.pos() == z1.pos());
        CHECK(zs.r_sq == doctest::Approx(s * s * z1.r() * z1.r()));
    }
}

TEST_CASE("one_mass_point_cost") {
    const Params p{1.0, 4.0};
    const double q = kPi / 2.0;
    CHECK(one_mass_point_cost(q * q, 2.0, 3.0, p) == doctest::Approx(5.0)); // a0 + a1
    CHECK(one_mass_point_cost(0.0, 1.7, 1.7, p) == doctest::Approx(0.0));
    CHECK(std::isinf(one_mass_point_cost(0.5, 1.0, 1.0, {0.0, 4.0})));
    // L = pi is finite for the cost even though no curve attains it
    CHECK(one_mass_point_cost(kPi * kPi, 1.0, 4.0, p) == doctest::Approx(9.0));

    // Against the discretized action oracle at a generic configuration.
    const ActionOracle oracle(1.0, 1.0, 2.0);
    CHECK(one_mass_point_cost(1.0, 1.0, 2.0, p) ==
          doctest::Approx(oracle.value).epsilon(1e-5));
}

TEST_CASE("one_mass_point_curve") {
    const auto at0 = one_mass_point_curve(0.0, 1.0, 2.0, 3.0);
    const auto at1 = one_mass_point_curve(1.0, 1.0, 2.0, 3.0);
    CHECK(at0.a == doctest::Approx(2.0));
    CHECK(at0.rho == doctest::Approx(0.0));
    CHECK(at1.a == doctest::Approx(3.0));
    CHECK(at1.rho == doctest::Approx(1.0));

    const auto mid = one_mass_point_curve(0.5, kPi / 2.0, 1.0, 1.0);
    CHECK(mid.a == doctest::Approx(0.5));
    CHECK(mid.rho == doctest::Approx(0.5));

    CHECK_THROWS_AS(one_mass_point_curve(0.5, kPi, 1.0, 1.0), std::invalid_argument);

    // The interior of the curve agrees with the action oracle.
    const ActionOracle oracle(1.0, 1.0, 2.0);
    for (double s : {0.25, 0.5, 0.75}) {
        const auto smp = one_mass_point_curve(s, 1.0, 1.0, 2.0);
        CHECK(smp.a == doctest::Approx(oracle.mass_at(s)).epsilon(2e-3));
    }
}

TEST_CASE("one_mass_point_curve matches the cone geodesic") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> Ld(0.05, 3.0);
    std::uniform_real_distribution<double> mass(0.1, 4.0);
    for (int it = 0; it < 100; ++it) {
        const double L = Ld(rng), a0 = mass(rng), a1 = mass(rng);
        const ConePoint z0 = ConePoint::at({0.0}, std::sqrt(a0));
        const ConePoint z1 = ConePoint::at({L}, std::sqrt(a1));
        for (int k = 0; k <= 10; ++k) {
            const double s   = k / 10.0;
            const auto curve = one_mass_point_curve(s, L, a0, a1);
            const auto cone  = cone_geodesic(s, z0, z1);
            CHECK(curve.a == doctest::Approx(cone.r_sq).epsilon(1e-10));
            CHECK(curve.rho * L == doctest::Approx(cone.rho * L).epsilon(1e-10));
        }
    }
}

TEST_CASE("curve_length_1mp") {
    const Params p{1.0, 4.0};
    const int n    = 2001;
    const double L = 1.0;

    SUBCASE("constant mass, linear rho") {
        std::vector<double> a(n, 0.7), rho(n);
        for (int i = 0; i < n; ++i) rho[i] = i / double(n - 1);
        CHECK(curve_length_1mp(a, rho, L, p) == doctest::Approx(L * L * 0.7).epsilon(1e-10));
    }
    SUBCASE("closed-form curve integrates to the closed-form cost") {
        std::vector<double> a(n), rho(n);
        for (int i = 0; i < n; ++i) {
            const auto smp = one_mass_point_curve(i / double(n - 1), L, 1.0, 2.0);
            a[i]   = smp.a;
            rho[i] = smp.rho;
        }
        CHECK(curve_length_1mp(a, rho, L, p) ==
              doctest::Approx(one_mass_point_cost(L * L, 1.0, 2.0, p))
                  .epsilon(tol::quad_tol));
    }
    SUBCASE("pure Hellinger arc hitting zero mass") {
        std::vector<double> a(n), rho(n, 0.0);
        for (int i = 0; i < n; ++i) {
            const double s = i / double(n - 1);
            a[i] = (1.0 - s) * (1.0 - s) * 0.9;
        }
        CHECK(curve_length_1mp(a, rho, 0.0, p) == doctest::Approx(0.9).epsilon(1e-9));
    }
    SUBCASE("degenerate parameter guards") {
        std::vector<double> a(n, 1.0), rho(n);
        for (int i = 0; i < n; ++i) rho[i] = i / double(n - 1);
        CHECK_THROWS_AS(curve_length_1mp(a, rho, L, {0.0, 4.0}), std::invalid_argument);
        std::vector<double> rising(n);
        for (int i = 0; i < n; ++i) rising[i] = 1.0 + i / double(n - 1);
        std::vector<double> flat(n, 0.3);
        CHECK_THROWS_AS(curve_length_1mp(rising, flat, L, {1.0, 0.0}),
                        std::invalid_argument);
        CHECK(curve_length_1mp(a, rho, L, {1.0, 0.0}) ==
              doctest::Approx(L * L).epsilon(1e-10)); // beta = 0, constant mass
    }
    SUBCASE("quadrature error shrinks ~4x when h halves") {
        auto err = [&](int samples) {
            std::vector<double> a(samples), rho(samples);
            for (int i = 0; i < samples; ++i) {
                const auto smp = one_mass_point_curve(i / double(samples - 1), L, 1.0, 2.0);
                a[i]   = smp.a;
                rho[i] = smp.rho;
            }
            return std::abs(curve_length_1mp(a, rho, L, p) -
                            one_mass_point_cost(L * L, 1.0, 2.0, p));
        };
        const double ratio = err(501) / err(1001);
        CHECK(ratio > 2.5);
        CHECK(ratio < 6.0);
    }
}

TEST_CASE("one-mass-point scaling identity") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ab(0.2, 6.0);
    std::uniform_real_distribution<double> Ld(0.0, 3.0);
    std::uniform_real_distribution<double> mass(0.1, 5.0);
    for (int it = 0; it < 300; ++it) {
        const Params p{ab(rng), ab(rng)};
        const double L = Ld(rng), a0 = mass(rng), a1 = mass(rng);
        const double theta = p.beta / 4.0;
        const double lhs   = one_mass_point_cost(L * L, a0, a1, p);
        const double rhs =
            one_mass_point_cost(theta * L * L / p.alpha, a0, a1, {1.0, 4.0}) / theta;
        CHECK(lhs == doctest::Approx(rhs).epsilon(tol::eq_tol));
    }
}
