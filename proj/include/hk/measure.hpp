#pragma once

#include <functional>
#include <vector>

#include "hk/geometry.hpp"

namespace hk {

/// Finite weighted point cloud on Omega, nonnegative masses.
struct DiscreteMeasure {
    struct Atom {
        Vec x;
        double m = 0.0;
    };

    int dim = 0;
    std::vector<Atom> atoms;

    DiscreteMeasure() = default;
    explicit DiscreteMeasure(int d) : dim(d) {}

    double total_mass() const;
    bool empty() const { return atoms.empty(); }

    void add(Vec x, double m);

    /// Merge coincident positions (within `radius`, mass-weighted barycenter)
    /// and drop atoms below the relative mass floor.
    DiscreteMeasure merged(double radius = 0.0) const;
};

/// Relative floor below which canonicalization drops atoms (scaling
/// iterations produce denormal dust).
inline constexpr double mass_floor_rel = 1e-15;

DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b);

double total_mass(const DiscreteMeasure& mu);
DiscreteMeasure merge_atoms(const DiscreteMeasure& mu, double radius);

/// Weighted atoms on the cone; at most one tip atom after canonicalization.
struct ConeMeasure {
    struct Atom {
        ConePoint z;
        double w = 0.0;
    };

    std::vector<Atom> atoms;

    void add(ConePoint z, double w);

    double total_weight() const;
    double tip_weight() const;
    double nontip_weight() const;
    /// Second moment sum w r^2 = mass of the projection.
    double second_moment() const;

    /// Tip atoms merged into one, zero-weight atoms dropped.
    ConeMeasure canonical() const;
};

/// Sparse coupling on cone x cone.
struct ConePlan {
    struct Entry {
        ConePoint z0, z1;
        double g = 0.0;
    };

    std::vector<Entry> entries;

    void add(ConePoint z0, ConePoint z1, double g);

    ConeMeasure marginal0() const;
    ConeMeasure marginal1() const;

    /// Transport cost of the plan: sum g * d_cone(z0, z1)^2.
    double cone_cost(const Params& p) const;
};

/// Projection P: integrates r^2 against test functions; tip mass vanishes.
DiscreteMeasure project(const ConeMeasure& lam);

/// Special lift L(mu, r_hat, kappa): atom (x, m) -> ([x, r_hat], m/r_hat^2)
/// plus a tip atom of weight kappa. r_hat is per-atom, aligned with mu.atoms.
ConeMeasure special_lift(const DiscreteMeasure& mu, const std::vector<double>& r_hat,
                         double kappa);
ConeMeasure special_lift(const DiscreteMeasure& mu, double r_hat, double kappa);

/// Dilation by a per-entry factor theta > 0: radii shrink by theta, mass
/// grows by theta^2; cone cost and projected marginals are invariant.
ConePlan dilate_plan(const ConePlan& gamma,
                     const std::function<double(const ConePlan::Entry&)>& theta);

/// Normalization operator N: rescale every entry by the pairwise factor
/// determined by the partition of cone x cone, drop tip-tip entries.
/// Idempotent; the projected geodesic is unchanged.
ConePlan normalize_plan(const ConePlan& gamma, const Params& p = {});

} // namespace hk
