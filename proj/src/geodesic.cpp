#include "hk/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hk/numerics.hpp"

namespace hk {

namespace {
constexpr double kPi     = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
} // namespace

DiscreteMeasure GeodesicCurve::eval(double s) const {
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("GeodesicCurve: s outside [0,1]");
    DiscreteMeasure mu;
    for (const auto& rec : pairs) {
        const ConeGeodesicSample zs = cone_geodesic(s, rec.z0, rec.z1, params);
        if (zs.r_sq <= 0.0) continue;
        mu.add(zs.z.pos(), zs.r_sq * rec.g);
    }
    for (const auto& a : pure0.atoms) mu.add(a.x, (1.0 - s) * (1.0 - s) * a.m);
    for (const auto& a : pure1.atoms) mu.add(a.x, s * s * a.m);
    return mu.merged(0.0);
}

double GeodesicCurve::plan_cost() const {
    double total = 0.0;
    for (const auto& rec : pairs) {
        const double d = cone_dist(rec.z0, rec.z1, params);
        total += rec.g * d * d;
    }
    total += params.lambda() * (pure0.total_mass() + pure1.total_mass());
    return total;
}

GeodesicCurve geodesic_from_plan(const ConePlan& gamma, const Params& p) {
    GeodesicCurve curve;
    curve.params = p;
    for (const auto& e : gamma.entries) {
        const bool tip0 = e.z0.is_tip();
        const bool tip1 = e.z1.is_tip();
        if (tip0 && tip1) continue;
        if (!tip0 && !tip1) {
            curve.pairs.push_back({e.z0, e.z1, e.g});
        } else if (tip1) {
            curve.pure0.add(e.z0.pos(), e.g * e.z0.r() * e.z0.r());
        } else {
            curve.pure1.add(e.z1.pos(), e.g * e.z1.r() * e.z1.r());
        }
    }
    curve.pure0 = curve.pure0.merged(0.0);
    curve.pure1 = curve.pure1.merged(0.0);
    return curve;
}

MassProfile mass_profile(const GeodesicCurve& curve) {
    MassProfile prof;
    for (const auto& rec : curve.pairs) {
        const double r0 = rec.z0.r();
        const double r1 = rec.z1.r();
        prof.m0 += rec.g * r0 * r0;
        prof.m1 += rec.g * r1 * r1;
        if (!rec.z0.is_tip() && !rec.z1.is_tip()) {
            const double ell = curve.params.scaled_length(dist(rec.z0.pos(), rec.z1.pos()));
            prof.m_star += rec.g * r0 * r1 * cos_trunc(ell, kPi);
        }
    }
    prof.m0 += curve.pure0.total_mass();
    prof.m1 += curve.pure1.total_mass();
    prof.hk_sq = curve.plan_cost();

    const double beta_quarter = curve.params.beta / 4.0;
    for (int k = 0; k <= 20; ++k) {
        const double s  = k / 20.0;
        const double m  = curve.eval(s).total_mass();
        const double qa = (1.0 - s) * (1.0 - s) * prof.m0 + s * s * prof.m1 +
                          2.0 * s * (1.0 - s) * prof.m_star;
        const double id = (1.0 - s) * prof.m0 + s * prof.m1 -
                          s * (1.0 - s) * beta_quarter * prof.hk_sq;
        prof.worst_deviation =
            std::max({prof.worst_deviation, std::abs(m - qa), std::abs(m - id)});
    }
    return prof;
}

GeodesicCurve hellinger_geodesic(const DiscreteMeasure& mu0in,
                                 const DiscreteMeasure& mu1in) {
    const DiscreteMeasure mu0 = mu0in.merged(0.0);
    const DiscreteMeasure mu1 = mu1in.merged(0.0);
    GeodesicCurve curve;
    curve.params = {1.0, 4.0};

    std::vector<char> used1(mu1.atoms.size(), 0);
    for (const auto& a0 : mu0.atoms) {
        bool shared = false;
        for (std::size_t j = 0; j < mu1.atoms.size(); ++j) {
            if (!used1[j] && mu1.atoms[j].x == a0.x) {
                curve.pairs.push_back({ConePoint::at(a0.x, std::sqrt(a0.m)),
                                       ConePoint::at(a0.x, std::sqrt(mu1.atoms[j].m)),
                                       1.0});
                used1[j] = 1;
                shared   = true;
                break;
            }
        }
        if (!shared) curve.pure0.add(a0.x, a0.m);
    }
    for (std::size_t j = 0; j < mu1.atoms.size(); ++j)
        if (!used1[j]) curve.pure1.add(mu1.atoms[j].x, mu1.atoms[j].m);
    return curve;
}

GeodesicCurve dilation_geodesic(const DiscreteMeasure& mu1, const Vec& y0,
                                const Params& p) {
    if (!p.positive()) throw std::invalid_argument("dilation_geodesic: alpha, beta > 0");
    GeodesicCurve curve;
    curve.params = p;
    for (const auto& a : mu1.merged(0.0).atoms) {
        const double ell = p.scaled_length(dist(a.x, y0));
        if (ell >= kHalfPi) {
            curve.pure1.add(a.x, a.m);
        } else {
            // The dilation profile ((1-s^2)cos^2 + s^2) m is the projection of
            // the cone record ([y0, cos ell], [x, 1], m).
            curve.pairs.push_back(
                {ConePoint::at(y0, std::cos(ell)), ConePoint::at(a.x, 1.0), a.m});
        }
    }
    return curve;
}

double hamilton_jacobi_residual(const PotentialField& field, const GridSpec& grid) {
    const int ns = static_cast<int>(std::round((grid.s_hi - grid.s_lo) / grid.ds)) + 1;
    const int nx = static_cast<int>(std::round((grid.x_hi - grid.x_lo) / grid.dx)) + 1;
    if (ns < 5 || nx < 3)
        throw std::invalid_argument("hamilton_jacobi_residual: grid too small");

    std::vector<double> xi(static_cast<std::size_t>(ns) * nx);
    for (int a = 0; a < ns; ++a) {
        const double s = grid.s_lo + a * grid.ds;
        for (int b = 0; b < nx; ++b)
            xi[static_cast<std::size_t>(a) * nx + b] = field.xi(s, grid.x_lo + b * grid.dx);
    }
    auto at = [&](int a, int b) { return xi[static_cast<std::size_t>(a) * nx + b]; };

    // The fields of interest behave like 1/s near s = 0, so the s-derivative
    // uses the five-point centered stencil; the x-part stays three-point and
    // dominates the O(h^2) error.
    double worst = 0.0;
    for (int a = 2; a + 2 < ns; ++a)
        for (int b = 1; b + 1 < nx; ++b) {
            const double ds_xi = (at(a - 2, b) - 8.0 * at(a - 1, b) +
                                  8.0 * at(a + 1, b) - at(a + 2, b)) /
                                 (12.0 * grid.ds);
            const double dx_xi = (at(a, b + 1) - at(a, b - 1)) / (2.0 * grid.dx);
            const double v     = at(a, b);
            worst = std::max(worst, std::abs(ds_xi + 0.5 * dx_xi * dx_xi + 2.0 * v * v));
        }
    return worst;
}

std::vector<TestFunction> monomial_tests(int max_degree) {
    std::vector<TestFunction> tests;
    for (int d = 0; d <= max_degree; ++d) {
        tests.push_back({[d](double u) { return std::pow(u, d); },
                         [d](double u) { return d == 0 ? 0.0 : d * std::pow(u, d - 1); }});
    }
    return tests;
}

double continuity_residual(const GeodesicCurve& curve, const PotentialField& field,
                           const std::vector<TestFunction>& tests, double ds) {
    auto moment = [&](double s, const TestFunction& t) {
        double acc = 0.0;
        for (const auto& a : curve.eval(s).atoms) acc += a.m * t.psi(field.coord(a.x));
        return acc;
    };
    auto rhs = [&](double s, const TestFunction& t) {
        double acc = 0.0;
        for (const auto& a : curve.eval(s).atoms) {
            const double u = field.coord(a.x);
            acc += a.m * (4.0 * field.xi(s, u) * t.psi(u) + field.Xi(s, u) * t.dpsi(u));
        }
        return acc;
    };

    double worst = 0.0;
    for (int k = 0; k <= 16; ++k) {
        const double s = 0.1 + 0.05 * k;
        for (const auto& t : tests) {
            const double lhs = (moment(s + ds, t) - moment(s - ds, t)) / (2.0 * ds);
            worst = std::max(worst, std::abs(lhs - rhs(s, t)));
        }
    }
    return worst;
}

TwoDiracFamily two_dirac_family(const Vec& y0, const Vec& y1,
                                const std::vector<std::pair<double, double>>& weights,
                                double b0, double b1) {
    const double L = dist(y0, y1);
    if (std::abs(L - kHalfPi) > 1e-9)
        throw std::invalid_argument("two_dirac_family: |y1-y0| must equal pi/2");
    if (b0 < 0.0 || b1 < 0.0)
        throw std::invalid_argument("two_dirac_family: negative endpoint mass");

    TwoDiracFamily fam;
    fam.curve.params = {1.0, 4.0};
    for (const auto& [r, w] : weights) {
        if (r <= 0.0 || w < 0.0)
            throw std::invalid_argument("two_dirac_family: weights need r > 0, w >= 0");
        if (w == 0.0) continue;
        fam.curve.pairs.push_back({ConePoint::at(y0, r), ConePoint::at(y1, 1.0), w});
        fam.a0 += w * r * r;
        fam.a1 += w;
    }
    if (b0 > 0.0) fam.curve.pure0.add(y0, b0);
    if (b1 > 0.0) fam.curve.pure1.add(y1, b1);
    fam.a0 += b0;
    fam.a1 += b1;

    Vec dir(y0.size());
    for (std::size_t k = 0; k < dir.size(); ++k) dir[k] = (y1[k] - y0[k]) / L;
    Vec base = y0;
    fam.field.coord = [base, dir](const Vec& x) {
        double u = 0.0;
        for (std::size_t k = 0; k < dir.size(); ++k) u += (x[k] - base[k]) * dir[k];
        return u;
    };
    fam.field.xi = [](double s, double u) {
        const double sn = std::sin(u);
        return (sn * sn - s) / (2.0 * s * (1.0 - s));
    };
    fam.field.Xi = [](double s, double u) {
        return std::sin(2.0 * u) / (2.0 * s * (1.0 - s));
    };
    return fam;
}

// ---------------------------------------------------------------------------
// Characteristic-function geodesic (mu0 = chi_[-pi/4,pi/4], mu1 = chi_[pi/2,pi])
// ---------------------------------------------------------------------------

namespace {

/// Branch machinery for the transport map h on I0 = [0, pi/4]. With
/// w(x) = pi/2 + x - h(x) and u = sqrt(1 - sin^2 w / sin^2 w*), the two
/// monotone branches integrate in closed form:
///   x_rise(w) = (k F(asin(sin w / k), k) + w) / 2,
///   x_fall(w) = pi/4 - (k F(asin(sin w / k), k) - w) / 2,      k = sin w*,
/// and h' = (1 -/+ u) / (1 +/- u), rho0 = (1 -/+ u) / (2 c*).
struct CharBranches {
    double w_star, c_star, k, x_star;

    double ell_f(double w) const {
        const double arg = std::clamp(std::sin(w) / k, -1.0, 1.0);
        return k * elliptic_f(std::asin(arg), k);
    }
    double x_rise(double w) const { return 0.5 * (ell_f(w) + w); }
    double x_fall(double w) const { return kPi / 4.0 - 0.5 * (ell_f(w) - w); }
    // y = h(x) in the w variable; rising is increasing, falling decreasing.
    double y_rise(double w) const { return kHalfPi + 0.5 * (ell_f(w) - w); }
    double y_fall(double w) const { return 3.0 * kPi / 4.0 - 0.5 * (ell_f(w) + w); }
    double y_star() const { return kHalfPi + x_star - w_star; }

    double u_of(double w) const {
        const double s = std::sin(w) / k;
        return std::sqrt(std::max(0.0, 1.0 - s * s));
    }

    // rising = true on [0, x*], false on [x*, pi/4]
    double w_of_x(double x, bool& rising, double xtol) const {
        rising = x <= x_star;
        if (x <= 0.0 || x >= kPi / 4.0) return 0.0;
        if (rising)
            return bisect([&](double w) { return x_rise(w) - x; }, 0.0, w_star, xtol);
        return bisect([&](double w) { return x_fall(w) - x; }, 0.0, w_star, xtol);
    }

    double w_of_y(double y, bool& rising, double xtol) const {
        rising = y <= y_star();
        if (y <= kHalfPi || y >= 3.0 * kPi / 4.0) return 0.0;
        if (rising)
            return bisect([&](double w) { return y_rise(w) - y; }, 0.0, w_star, xtol);
        return bisect([&](double w) { return y_fall(w) - y; }, 0.0, w_star, xtol);
    }

    double h_from(double x, double w) const { return kHalfPi + x - w; }
    double hp_from(double w, bool rising) const {
        const double u = u_of(w);
        return rising ? (1.0 - u) / (1.0 + u) : (1.0 + u) / (1.0 - u);
    }
    double rho0_from(double w, bool rising) const {
        const double u = u_of(w);
        return (rising ? 1.0 - u : 1.0 + u) / (2.0 * c_star);
    }
    double rho1_from(double w, bool rising) const {
        const double u = u_of(w);
        return (rising ? 1.0 + u : 1.0 - u) / (2.0 * c_star);
    }
};

} // namespace

double CharGeodesic::h_at(double xq) const { return h_fn_(xq); }
double CharGeodesic::hprime_at(double xq) const { return hp_fn_(xq); }
double CharGeodesic::rho0_at(double xq) const { return rho0_fn_(xq); }
double CharGeodesic::rho1_at(double yq) const { return rho1_fn_(yq); }

CharGeodesic char_function_geodesic(const CharFnConfig& cfg) {
    CharGeodesic out;

    // Calibration: sin(w*) K(sin w*) = pi/4 has a unique root in (0, pi/2).
    auto cal = [](double w) { return std::sin(w) * elliptic_k(std::sin(w)) - kPi / 4.0; };
    if (!(cal(1e-6) < 0.0) || !(cal(kHalfPi - 1e-6) > 0.0))
        throw ShootingFailure("char_function_geodesic: calibration bracket failed");
    out.w_star = bisect(cal, 1e-6, kHalfPi - 1e-6, 1e-15);
    out.c_star = 1.0 / (2.0 * std::sin(out.w_star));

    CharBranches br{out.w_star, out.c_star, std::sin(out.w_star),
                    0.5 * (kPi / 4.0 + out.w_star)};
    const double xtol = cfg.bis_tol;

    out.h_fn_ = [br, xtol](double x) {
        bool rising;
        const double w = br.w_of_x(x, rising, xtol);
        return br.h_from(std::clamp(x, 0.0, kPi / 4.0), w);
    };
    out.hp_fn_ = [br, xtol](double x) {
        bool rising;
        const double w = br.w_of_x(x, rising, xtol);
        return br.hp_from(w, rising);
    };
    out.rho0_fn_ = [br, xtol](double x) {
        bool rising;
        const double w = br.w_of_x(x, rising, xtol);
        return br.rho0_from(w, rising);
    };
    out.rho1_fn_ = [br, xtol](double y) {
        // endpoints: the limits (1 +/- u)/(2 c*) remain valid
        if (y <= kHalfPi) return 1.0 / br.c_star;
        if (y >= 3.0 * kPi / 4.0) return 0.0;
        bool rising;
        const double w = br.w_of_y(y, rising, xtol);
        return br.rho1_from(w, rising);
    };

    const int n = std::max(cfg.grid_n, 9);
    out.x.resize(n);
    out.h.resize(n);
    out.hp.resize(n);
    out.rho0.resize(n);
    out.y.resize(n);
    out.rho1.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = kPi / 4.0 * i / (n - 1);
        out.x[i]    = x;
        out.h[i]    = out.h_fn_(x);
        out.hp[i]   = out.hp_fn_(x);
        out.rho0[i] = out.rho0_fn_(x);
        const double y = kHalfPi + kPi / 4.0 * i / (n - 1);
        out.y[i]    = y;
        out.rho1[i] = out.rho1_fn_(y);
    }

    out.marginal_mismatch = std::abs(
        adaptive_simpson(out.rho0_fn_, 0.0, kPi / 4.0, 1e-12) -
        adaptive_simpson(out.rho1_fn_, kHalfPi, 3.0 * kPi / 4.0, 1e-12));

    // Density frames: moving part on a midpoint grid (rho0 and h' are
    // singular-free there), plus the pure Hellinger wings.
    std::vector<double> frame_s = cfg.frame_s;
    if (frame_s.empty())
        for (int k = 0; k <= 20; ++k) frame_s.push_back(k / 20.0);

    const int fn = 200;
    std::vector<double> fx(fn), fr0(fn), fr1(fn), fcos(fn), frho0(fn);
    for (int i = 0; i < fn; ++i) {
        const double x = kPi / 4.0 * (i + 0.5) / fn;
        bool rising;
        const double w = br.w_of_x(x, rising, xtol);
        fx[i]    = x;
        frho0[i] = br.rho0_from(w, rising);
        fr0[i]   = 1.0 / std::sqrt(frho0[i]);
        fr1[i]   = 1.0 / std::sqrt(br.rho1_from(w, rising));
        fcos[i]  = std::cos(br.h_from(x, w) - x);
    }
    for (double s : frame_s) {
        std::vector<double> Y(fn), Rsq(fn);
        for (int i = 0; i < fn; ++i) {
            Rsq[i] = (1.0 - s) * (1.0 - s) * fr0[i] * fr0[i] + s * s * fr1[i] * fr1[i] +
                     2.0 * s * (1.0 - s);
            const double arg =
                std::clamp(((1.0 - s) * fr0[i] + s * fr1[i] * fcos[i]) /
                               std::sqrt(Rsq[i]),
                           -1.0, 1.0);
            Y[i] = fx[i] + std::acos(arg);
        }
        for (int i = 0; i < fn; ++i) {
            double dY;
            if (i == 0)
                dY = (Y[1] - Y[0]) / (fx[1] - fx[0]);
            else if (i == fn - 1)
                dY = (Y[fn - 1] - Y[fn - 2]) / (fx[fn - 1] - fx[fn - 2]);
            else
                dY = (Y[i + 1] - Y[i - 1]) / (fx[i + 1] - fx[i - 1]);
            out.frames.push_back({s, Y[i], Rsq[i] * frho0[i] / dY});
        }
        // Hellinger wings: chi_[-pi/4, 0] annihilates, chi_[3pi/4, pi] grows.
        const int wn = 40;
        for (int i = 0; i < wn; ++i) {
            const double xa = -kPi / 4.0 + kPi / 4.0 * (i + 0.5) / wn;
            out.frames.push_back({s, xa, (1.0 - s) * (1.0 - s)});
            const double xb = 3.0 * kPi / 4.0 + kPi / 4.0 * (i + 0.5) / wn;
            out.frames.push_back({s, xb, s * s});
        }
    }
    return out;
}

} // namespace hk
