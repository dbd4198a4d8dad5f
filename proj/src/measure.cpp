#include "hk/measure.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hk {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;
}

void DiscreteMeasure::add(Vec x, double m) {
    if (m < 0.0) throw std::invalid_argument("DiscreteMeasure: negative mass");
    if (dim == 0 && !x.empty()) dim = static_cast<int>(x.size());
    if (static_cast<int>(x.size()) != dim)
        throw std::invalid_argument("DiscreteMeasure: dimension mismatch");
    atoms.push_back({std::move(x), m});
}

double DiscreteMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.m;
    return s;
}

DiscreteMeasure DiscreteMeasure::merged(double radius) const {
    DiscreteMeasure out(dim);
    struct Cluster {
        Vec x;
        double m;
    };
    std::vector<Cluster> clusters;
    for (const auto& a : atoms) {
        bool placed = false;
        for (auto& c : clusters) {
            const bool hit = radius == 0.0 ? c.x == a.x
                                           : dist(c.x, a.x) <= radius;
            if (hit) {
                if (radius > 0.0 && a.m > 0.0) {
                    const double tot = c.m + a.m;
                    for (std::size_t k = 0; k < c.x.size(); ++k)
                        c.x[k] = (c.m * c.x[k] + a.m * a.x[k]) / tot;
                }
                c.m += a.m;
                placed = true;
                break;
            }
        }
        if (!placed) clusters.push_back({a.x, a.m});
    }
    const double floor = mass_floor_rel * total_mass();
    for (auto& c : clusters)
        if (c.m >= floor && c.m > 0.0) out.atoms.push_back({std::move(c.x), c.m});
    return out;
}

DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    if (a.dim != b.dim && !a.atoms.empty() && !b.atoms.empty())
        throw std::invalid_argument("DiscreteMeasure: dimension mismatch in sum");
    DiscreteMeasure out(a.atoms.empty() ? b.dim : a.dim);
    out.atoms = a.atoms;
    out.atoms.insert(out.atoms.end(), b.atoms.begin(), b.atoms.end());
    return out;
}

double total_mass(const DiscreteMeasure& mu) { return mu.total_mass(); }

DiscreteMeasure merge_atoms(const DiscreteMeasure& mu, double radius) {
    return mu.merged(radius);
}

void ConeMeasure::add(ConePoint z, double w) {
    if (w < 0.0) throw std::invalid_argument("ConeMeasure: negative weight");
    atoms.push_back({std::move(z), w});
}

double ConeMeasure::total_weight() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.w;
    return s;
}

double ConeMeasure::tip_weight() const {
    double s = 0.0;
    for (const auto& a : atoms)
        if (a.z.is_tip()) s += a.w;
    return s;
}

double ConeMeasure::nontip_weight() const { return total_weight() - tip_weight(); }

double ConeMeasure::second_moment() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.w * a.z.r() * a.z.r();
    return s;
}

ConeMeasure ConeMeasure::canonical() const {
    ConeMeasure out;
    double tip = 0.0;
    for (const auto& a : atoms) {
        if (a.w == 0.0) continue;
        if (a.z.is_tip())
            tip += a.w;
        else
            out.atoms.push_back(a);
    }
    if (tip > 0.0) out.atoms.push_back({ConePoint::tip(), tip});
    return out;
}

void ConePlan::add(ConePoint z0, ConePoint z1, double g) {
    if (g < 0.0) throw std::invalid_argument("ConePlan: negative mass");
    entries.push_back({std::move(z0), std::move(z1), g});
}

ConeMeasure ConePlan::marginal0() const {
    ConeMeasure m;
    for (const auto& e : entries) m.add(e.z0, e.g);
    return m.canonical();
}

ConeMeasure ConePlan::marginal1() const {
    ConeMeasure m;
    for (const auto& e : entries) m.add(e.z1, e.g);
    return m.canonical();
}

double ConePlan::cone_cost(const Params& p) const {
    double s = 0.0;
    for (const auto& e : entries) {
        const double d = cone_dist(e.z0, e.z1, p);
        s += e.g * d * d;
    }
    return s;
}

DiscreteMeasure project(const ConeMeasure& lam) {
    DiscreteMeasure mu;
    for (const auto& a : lam.atoms) {
        if (a.z.is_tip()) continue;
        mu.add(a.z.pos(), a.w * a.z.r() * a.z.r());
    }
    return mu.merged(0.0);
}

ConeMeasure special_lift(const DiscreteMeasure& mu, const std::vector<double>& r_hat,
                         double kappa) {
    if (r_hat.size() != mu.atoms.size())
        throw std::invalid_argument("special_lift: r_hat must align with atoms");
    if (kappa < 0.0) throw std::invalid_argument("special_lift: negative tip weight");
    ConeMeasure lam;
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        const double r = r_hat[i];
        if (r <= 0.0) throw std::invalid_argument("special_lift: r_hat must be positive");
        lam.add(ConePoint::at(mu.atoms[i].x, r), mu.atoms[i].m / (r * r));
    }
    if (kappa > 0.0) lam.add(ConePoint::tip(), kappa);
    return lam.canonical();
}

ConeMeasure special_lift(const DiscreteMeasure& mu, double r_hat, double kappa) {
    return special_lift(mu, std::vector<double>(mu.atoms.size(), r_hat), kappa);
}

ConePlan dilate_plan(const ConePlan& gamma,
                     const std::function<double(const ConePlan::Entry&)>& theta) {
    ConePlan out;
    out.entries.reserve(gamma.entries.size());
    for (const auto& e : gamma.entries) {
        const double t = theta(e);
        if (!(t > 0.0)) throw std::invalid_argument("dilate_plan: theta must be positive");
        auto scale = [&](const ConePoint& z) {
            return z.is_tip() ? ConePoint::tip() : ConePoint::at(z.pos(), z.r() / t);
        };
        out.entries.push_back({scale(e.z0), scale(e.z1), t * t * e.g});
    }
    return out;
}

ConePlan normalize_plan(const ConePlan& gamma, const Params& p) {
    ConePlan out;
    for (const auto& e : gamma.entries) {
        const bool tip0 = e.z0.is_tip();
        const bool tip1 = e.z1.is_tip();
        if (tip0 && tip1) continue; // G'_0 is dropped
        double theta;
        if (!tip0 && !tip1) {
            const double ell = p.scaled_length(dist(e.z0.pos(), e.z1.pos()));
            theta = ell < kHalfPi
                        ? std::sqrt(e.z0.r() * e.z1.r() * std::cos(ell)) // G
                        : e.z0.r();                                      // G'_12
        } else if (!tip0) {
            theta = e.z0.r(); // G'_1
        } else {
            theta = e.z1.r(); // G'_2
        }
        auto scale = [&](const ConePoint& z) {
            return z.is_tip() ? ConePoint::tip() : ConePoint::at(z.pos(), z.r() / theta);
        };
        out.entries.push_back({scale(e.z0), scale(e.z1), theta * theta * e.g});
    }
    return out;
}

} // namespace hk
