#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "hk/measure.hpp"
#include "hk/tolerances.hpp"

using namespace hk;

namespace {
constexpr double kPi = std::numbers::pi;

ConePlan random_plan(std::mt19937_64& rng, int entries) {
    std::uniform_real_distribution<double> pos(-2.0, 2.0);
    std::uniform_real_distribution<double> rad(0.1, 2.0);
    std::uniform_real_distribution<double> mass(0.1, 2.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    ConePlan plan;
    for (int i = 0; i < entries; ++i) {
        auto pt = [&] {
            return coin(rng) < 0.15 ? ConePoint::tip()
                                    : ConePoint::at({pos(rng), pos(rng)}, rad(rng));
        };
        plan.add(pt(), pt(), mass(rng));
    }
    return plan;
}
} // namespace

TEST_CASE("total_mass and merge_atoms") {
    DiscreteMeasure mu(1);
    CHECK(total_mass(mu) == 0.0);
    mu.add({1.0}, 1.0);
    mu.add({1.0}, 2.0);
    mu.add({2.0}, 0.5);
    const DiscreteMeasure merged = merge_atoms(mu, 0.0);
    CHECK(merged.atoms.size() == 2);
    CHECK(merged.atoms[0].m == doctest::Approx(3.0));
    CHECK(total_mass(merged) == doctest::Approx(total_mass(mu)));

    DiscreteMeasure close(1);
    close.add({0.0}, 1.0);
    close.add({1e-10}, 3.0);
    const DiscreteMeasure fused = merge_atoms(close, 1e-9);
    CHECK(fused.atoms.size() == 1);
    CHECK(fused.atoms[0].m == doctest::Approx(4.0));
    CHECK(fused.atoms[0].x[0] == doctest::Approx(3e-10 / 4.0)); // barycenter

    DiscreteMeasure dusty(1);
    dusty.add({0.0}, 1.0);
    dusty.add({1.0}, 1e-17);
    CHECK(merge_atoms(dusty, 0.0).atoms.size() == 1); // below the mass floor
}

TEST_CASE("project") {
    ConeMeasure tip_only;
    tip_only.add(ConePoint::tip(), 5.0);
    CHECK(project(tip_only).atoms.empty());

    ConeMeasure lam;
    lam.add(ConePoint::at({1.0, 0.0}, 2.0), 3.0);
    const DiscreteMeasure mu = project(lam);
    REQUIRE(mu.atoms.size() == 1);
    CHECK(mu.atoms[0].m == doctest::Approx(12.0));

    // linearity after merge
    ConeMeasure lam2;
    lam2.add(ConePoint::at({1.0, 0.0}, 0.5), 4.0);
    lam2.add(ConePoint::at({2.0, 2.0}, 1.0), 1.0);
    ConeMeasure sum = lam;
    for (const auto& a : lam2.atoms) sum.add(a.z, a.w);
    const DiscreteMeasure left  = project(sum);
    const DiscreteMeasure right = (project(lam) + project(lam2)).merged(0.0);
    REQUIRE(left.atoms.size() == right.atoms.size());
    for (std::size_t i = 0; i < left.atoms.size(); ++i) {
        CHECK(left.atoms[i].x == right.atoms[i].x);
        CHECK(left.atoms[i].m == doctest::Approx(right.atoms[i].m).epsilon(1e-15));
    }
}

TEST_CASE("special_lift") {
    DiscreteMeasure mu(2);
    mu.add({0.0, 1.0}, 4.0);
    const ConeMeasure lifted = special_lift(mu, 2.0, 0.0);
    REQUIRE(lifted.atoms.size() == 1);
    CHECK(lifted.atoms[0].w == doctest::Approx(1.0));
    CHECK(lifted.atoms[0].z.r() == doctest::Approx(2.0));

    const ConeMeasure with_tip = special_lift(mu, 1.0, 7.0);
    CHECK(with_tip.tip_weight() == doctest::Approx(7.0));
    CHECK(with_tip.nontip_weight() == doctest::Approx(4.0));

    CHECK_THROWS_AS(special_lift(mu, -1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(special_lift(mu, 0.0, 0.0), std::invalid_argument);

    // project . special_lift = identity; second moment carries the mass
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> rh(0.1, 3.0);
    for (int it = 0; it < 50; ++it) {
        DiscreteMeasure m2(2);
        m2.add({0.0, 0.0}, rh(rng));
        m2.add({1.0, 1.0}, rh(rng));
        std::vector<double> radii{rh(rng), rh(rng)};
        const ConeMeasure lam = special_lift(m2, radii, rh(rng));
        CHECK(lam.second_moment() == doctest::Approx(m2.total_mass()).epsilon(1e-14));
        const DiscreteMeasure back = project(lam);
        REQUIRE(back.atoms.size() == 2);
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(back.atoms[i].m == doctest::Approx(m2.atoms[i].m).epsilon(1e-14));
    }
}

TEST_CASE("dilate_plan") {
    std::mt19937_64 rng(23);
    const Params p{1.0, 4.0};

    SUBCASE("identity and the single-entry example") {
        ConePlan plan;
        plan.add(ConePoint::at({0.0}, 1.0), ConePoint::at({1.0}, 1.0), 1.0);
        const ConePlan same = dilate_plan(plan, [](const auto&) { return 1.0; });
        CHECK(same.entries[0].g == 1.0);
        CHECK(same.entries[0].z0.r() == 1.0);

        const ConePlan half = dilate_plan(plan, [](const auto&) { return 2.0; });
        CHECK(half.entries[0].z0.r() == doctest::Approx(0.5));
        CHECK(half.entries[0].g == doctest::Approx(4.0));
        CHECK(half.cone_cost(p) == doctest::Approx(plan.cone_cost(p)).epsilon(1e-14));

        CHECK_THROWS_AS(dilate_plan(plan, [](const auto&) { return 0.0; }),
                        std::invalid_argument);
    }
    SUBCASE("cost and projected marginals preserved on random plans") {
        std::uniform_real_distribution<double> th(0.3, 3.0);
        for (int it = 0; it < 40; ++it) {
            const ConePlan plan = random_plan(rng, 6);
            std::vector<double> factors;
            for (std::size_t i = 0; i < plan.entries.size(); ++i)
                factors.push_back(th(rng));
            std::size_t pos    = 0;
            const ConePlan dil = dilate_plan(plan, [&](const auto&) {
                return factors[pos++ % factors.size()];
            });
            CHECK(dil.cone_cost(p) ==
                  doctest::Approx(plan.cone_cost(p)).epsilon(tol::eq_tol));

            const DiscreteMeasure p0 = project(plan.marginal0());
            const DiscreteMeasure q0 = project(dil.marginal0());
            REQUIRE(p0.atoms.size() == q0.atoms.size());
            for (std::size_t i = 0; i < p0.atoms.size(); ++i)
                CHECK(p0.atoms[i].m == doctest::Approx(q0.atoms[i].m).epsilon(1e-12));
        }
    }
}

TEST_CASE("normalize_plan") {
    SUBCASE("tip-tip entries are removed") {
        ConePlan plan;
        plan.add(ConePoint::tip(), ConePoint::tip(), 3.0);
        CHECK(normalize_plan(plan).entries.empty());
    }
    SUBCASE("G'_1 entry scales to radius one") {
        ConePlan plan;
        plan.add(ConePoint::at({0.3}, 2.0), ConePoint::tip(), 1.0);
        const ConePlan norm = normalize_plan(plan);
        REQUIRE(norm.entries.size() == 1);
        CHECK(norm.entries[0].z0.r() == doctest::Approx(1.0));
        CHECK(norm.entries[0].g == doctest::Approx(4.0));
    }
    SUBCASE("idempotence on random plans") {
        std::mt19937_64 rng(29);
        for (int it = 0; it < 60; ++it) {
            const ConePlan once  = normalize_plan(random_plan(rng, 8));
            const ConePlan twice = normalize_plan(once);
            REQUIRE(once.entries.size() == twice.entries.size());
            for (std::size_t i = 0; i < once.entries.size(); ++i) {
                CHECK(twice.entries[i].z0.r() ==
                      doctest::Approx(once.entries[i].z0.r()).epsilon(tol::eq_tol));
                CHECK(twice.entries[i].z1.r() ==
                      doctest::Approx(once.entries[i].z1.r()).epsilon(tol::eq_tol));
                CHECK(twice.entries[i].g ==
                      doctest::Approx(once.entries[i].g).epsilon(tol::eq_tol));
            }
        }
    }
    SUBCASE("boundary |x0-x1| = pi/2 belongs to the r0-scaled class") {
        ConePlan plan;
        plan.add(ConePoint::at({0.0}, 2.0), ConePoint::at({kPi / 2.0}, 3.0), 1.0);
        const ConePlan norm = normalize_plan(plan);
        CHECK(norm.entries[0].z0.r() == doctest::Approx(1.0));
        CHECK(norm.entries[0].z1.r() == doctest::Approx(1.5));
        CHECK(norm.entries[0].g == doctest::Approx(4.0));
    }
}
