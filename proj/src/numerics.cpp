#include "hk/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hk {

double elliptic_k(double k) {
    if (std::abs(k) >= 1.0) throw std::invalid_argument("elliptic_k: |k| must be < 1");
    double a = 1.0;
    double b = std::sqrt(1.0 - k * k);
    for (int it = 0; it < 60 && std::abs(a - b) > 4e-16 * a; ++it) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return std::numbers::pi / (2.0 * a);
}

double carlson_rf(double x, double y, double z) {
    // Duplication theorem; converges quadratically.
    double X = x, Y = y, Z = z;
    for (int it = 0; it < 200; ++it) {
        const double lam = std::sqrt(X) * std::sqrt(Y) + std::sqrt(Y) * std::sqrt(Z) +
                           std::sqrt(Z) * std::sqrt(X);
        X = 0.25 * (X + lam);
        Y = 0.25 * (Y + lam);
        Z = 0.25 * (Z + lam);
        const double mu = (X + Y + Z) / 3.0;
        if (std::max({std::abs(X - mu), std::abs(Y - mu), std::abs(Z - mu)}) <
            1e-12 * mu) {
            const double dx = 1.0 - X / mu, dy = 1.0 - Y / mu, dz = 1.0 - Z / mu;
            const double e2 = dx * dy + dy * dz + dz * dx;
            const double e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) /
                   std::sqrt(mu);
        }
    }
    throw std::runtime_error("carlson_rf: no convergence");
}

double elliptic_f(double phi, double k) {
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    return s * carlson_rf(c * c, 1.0 - k * k * s * s, 1.0);
}

namespace {
double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa, double b,
             double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm  = 0.5 * (a + m);
    const double rm  = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left  = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    if (depth > 50 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, a, fa, m, fm, lm, flm, left, tol * 0.5, depth + 1) +
           adapt(f, m, fm, b, fb, rm, frm, right, tol * 0.5, depth + 1);
}
} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
    const double m  = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    return adapt(f, a, fa, b, fb, m, fm, simpson(a, fa, b, fb, fm), tol, 0);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol,
              int max_iter) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::runtime_error("bisect: no sign change over the bracket");
    for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm  = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (fhi > 0.0)) {
            hi  = mid;
            fhi = fm;
        } else {
            lo  = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace hk
