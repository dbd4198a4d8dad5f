#include "hk/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hk {

namespace {
constexpr double kPi  = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }
} // namespace

double sq_dist(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

double dist(const Vec& a, const Vec& b) { return std::sqrt(sq_dist(a, b)); }

ConePoint ConePoint::at(Vec x, double r) {
    if (r < 0.0) throw std::invalid_argument("ConePoint: negative radius");
    ConePoint z;
    if (r == 0.0) return z; // tip, position discarded
    z.x_   = std::move(x);
    z.r_   = r;
    z.tip_ = false;
    return z;
}

const Vec& ConePoint::pos() const {
    if (tip_) throw std::logic_error("ConePoint: position of the tip is undefined");
    return x_;
}

bool operator==(const ConePoint& a, const ConePoint& b) {
    if (a.tip_ || b.tip_) return a.tip_ && b.tip_;
    return a.r_ == b.r_ && a.x_ == b.x_;
}

double cos_trunc(double a, double b) { return std::cos(std::min(std::abs(a), b)); }

double sigma_ab(double L_sq, double b0, double b1, const Params& p) {
    const double L = std::sqrt(L_sq);
    if (p.alpha > 0.0 && p.beta > 0.0) {
        const double c = cos_trunc(p.scaled_length(L), kPi);
        return (4.0 / p.beta) * (b0 * b0 + b1 * b1 - 2.0 * b0 * b1 * c);
    }
    if (p.alpha == 0.0 && p.beta > 0.0) {
        // Finite only for L = 0; the cost is the squared Hellinger arc.
        if (L_sq == 0.0) return (4.0 / p.beta) * (b0 - b1) * (b0 - b1);
        return kInf;
    }
    if (p.beta == 0.0 && p.alpha > 0.0) {
        if (b0 == b1) return (L_sq / p.alpha) * b0 * b0;
        return kInf;
    }
    // alpha = beta = 0
    if (L_sq == 0.0 && b0 == b1) return 0.0;
    return kInf;
}

double cone_dist(const ConePoint& z0, const ConePoint& z1, const Params& p) {
    // With a tip endpoint the angle is irrelevant (r0*r1 = 0); use L = 0 so
    // the degenerate branches stay finite where they should.
    const double L_sq =
        (z0.is_tip() || z1.is_tip()) ? 0.0 : sq_dist(z0.pos(), z1.pos());
    return std::sqrt(sigma_ab(L_sq, z0.r(), z1.r(), p));
}

ConeGeodesicSample cone_geodesic(double s, const ConePoint& z0, const ConePoint& z1,
                                 const Params& p) {
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("cone_geodesic: s outside [0,1]");
    const double r0 = z0.r();
    const double r1 = z1.r();

    // Endpoints bit-exact, so projected curves reproduce their measures.
    if (s == 0.0) return {z0, r0 * r0, 0.0};
    if (s == 1.0) return {z1, r1 * r1, 1.0};

    if (z0.is_tip() && z1.is_tip()) return {ConePoint::tip(), 0.0, s};

    // A tip endpoint carries an arbitrary position; pin it to the other
    // endpoint so the moving point never leaves that position.
    const Vec& x0 = z0.is_tip() ? z1.pos() : z0.pos();
    const Vec& x1 = z1.is_tip() ? z0.pos() : z1.pos();
    const double ell = p.scaled_length(dist(x0, x1));

    const double cpi  = cos_trunc(ell, kPi);
    const double r_sq = (1.0 - s) * (1.0 - s) * r0 * r0 + s * s * r1 * r1 +
                        2.0 * s * (1.0 - s) * r0 * r1 * cpi;

    double rho;
    if (ell >= kPi) {
        // Through the tip; sign(0) := +1 (the point is the tip there).
        const double d = s * r1 - (1.0 - s) * r0;
        rho = 0.5 * (1.0 + (d >= 0.0 ? 1.0 : -1.0));
    } else if (ell == 0.0) {
        // Limit of the arccos formula as the angle vanishes.
        const double denom = (1.0 - s) * r0 + s * r1;
        rho = denom > 0.0 ? s * r1 / denom : (s > 0.0 ? 1.0 : 0.0);
    } else {
        const double R = std::sqrt(std::max(r_sq, 0.0));
        if (R == 0.0) {
            rho = s > 0.0 ? 1.0 : 0.0;
        } else {
            const double arg = clamp_unit(((1.0 - s) * r0 + s * r1 * std::cos(ell)) / R);
            rho = std::acos(arg) / ell;
        }
    }
    rho = std::clamp(rho, 0.0, 1.0);

    if (r_sq <= 0.0) return {ConePoint::tip(), 0.0, rho};

    Vec x(x0.size());
    for (std::size_t k = 0; k < x.size(); ++k)
        x[k] = (1.0 - rho) * x0[k] + rho * x1[k];
    return {ConePoint::at(std::move(x), std::sqrt(r_sq)), r_sq, rho};
}

double one_mass_point_cost(double L_sq, double a0, double a1, const Params& p) {
    if (L_sq < 0.0 || a0 < 0.0 || a1 < 0.0)
        throw std::invalid_argument("one_mass_point_cost: negative input");
    return sigma_ab(L_sq, std::sqrt(a0), std::sqrt(a1), p);
}

OneMassPointSample one_mass_point_curve(double s, double L, double a0, double a1) {
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("one_mass_point_curve: s outside [0,1]");
    if (L < 0.0 || L >= kPi)
        throw std::invalid_argument("one_mass_point_curve: requires 0 <= L < pi");
    if (a0 <= 0.0 || a1 <= 0.0)
        throw std::invalid_argument("one_mass_point_curve: masses must be positive");

    const double b0 = std::sqrt(a0);
    const double b1 = std::sqrt(a1);
    const double cL = std::cos(L);
    const double a  = (1.0 - s) * (1.0 - s) * a0 + s * s * a1 +
                      2.0 * s * (1.0 - s) * b0 * b1 * cL;

    double rho;
    const double denom = (1.0 - s) * b0 + s * cL * b1;
    if (L == 0.0) {
        rho = denom > 0.0 ? s * b1 / denom : s; // continuity limit; unobservable
    } else if (denom > 0.0) {
        rho = std::atan(s * std::sin(L) * b1 / denom) / L;
    } else if (denom == 0.0) {
        rho = kPi / (2.0 * L);
    } else {
        rho = std::atan(s * std::sin(L) * b1 / denom) / L + kPi / L;
    }
    return {a, std::clamp(rho, 0.0, 1.0)};
}

double curve_length_1mp(std::span<const double> a_samples,
                        std::span<const double> rho_samples, double L, const Params& p) {
    const std::size_t n = a_samples.size();
    if (n < 3 || rho_samples.size() != n)
        throw std::invalid_argument("curve_length_1mp: need >= 3 aligned samples");
    for (double a : a_samples)
        if (a < 0.0) throw std::invalid_argument("curve_length_1mp: negative mass sample");

    const double h = 1.0 / static_cast<double>(n - 1);

    auto diff = [&](std::span<const double> f, std::size_t i) {
        if (i == 0) return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        if (i == n - 1) return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
        return (f[i + 1] - f[i - 1]) / (2.0 * h);
    };

    const bool rho_const = std::ranges::all_of(
        rho_samples, [&](double r) { return r == rho_samples[0]; });
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = std::sqrt(a_samples[i]);
    const bool a_const = std::ranges::all_of(
        a_samples, [&](double a) { return a == a_samples[0]; });

    if (p.alpha == 0.0 && !rho_const)
        throw std::invalid_argument("curve_length_1mp: alpha = 0 with nonconstant rho");
    if (p.beta == 0.0 && !a_const)
        throw std::invalid_argument("curve_length_1mp: beta = 0 with nonconstant mass");

    double total = 0.0;
    double prev  = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = 0.0;
        if (p.alpha > 0.0) {
            const double dr = diff(rho_samples, i);
            f += (L * L / p.alpha) * dr * dr * a_samples[i];
        }
        if (p.beta > 0.0) {
            const double db = diff(b, i); // da^2/(beta a) == 4 (db)^2 / beta
            f += 4.0 * db * db / p.beta;
        }
        if (i > 0) total += 0.5 * h * (prev + f);
        prev = f;
    }
    return total;
}

} // namespace hk
