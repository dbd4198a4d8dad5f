#include "hk/cone_ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "hk/tolerances.hpp"

namespace hk {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kInf    = std::numeric_limits<double>::infinity();
} // namespace

TransportSolution transport_lp(const std::vector<double>& supply,
                               const std::vector<double>& demand,
                               const std::vector<double>& cost) {
    const int n = static_cast<int>(supply.size());
    const int m = static_cast<int>(demand.size());
    if (n == 0 || m == 0) return {};
    if (cost.size() != static_cast<std::size_t>(n) * m)
        throw std::invalid_argument("transport_lp: cost size mismatch");

    auto c = [&](int i, int j) { return cost[static_cast<std::size_t>(i) * m + j]; };

    struct Cell {
        int i, j;
        double flow;
    };
    std::vector<Cell> basis;
    basis.reserve(n + m - 1);

    // Northwest-corner initial basis; ties produce zero-flow basic cells so
    // the spanning tree keeps exactly n+m-1 arcs.
    {
        std::vector<double> s = supply, d = demand;
        int i = 0, j = 0;
        while (true) {
            const double x = std::min(s[i], d[j]);
            basis.push_back({i, j, x});
            s[i] -= x;
            d[j] -= x;
            if (i == n - 1 && j == m - 1) break;
            if (s[i] <= 0.0 && i < n - 1)
                ++i;
            else
                ++j;
        }
    }

    const int nodes = n + m; // rows 0..n-1, columns n..n+m-1
    double cmax = 0.0;
    for (double v : cost) cmax = std::max(cmax, std::abs(v));
    const double rc_tol = 1e-11 * (1.0 + cmax);

    std::vector<std::vector<int>> adj(nodes);
    std::vector<double> u(n), v(m);
    std::vector<int> parent(nodes), parent_cell(nodes);
    std::vector<char> seen(nodes);

    const int max_pivots = 20000 + 40 * n * m;
    for (int pivot = 0;; ++pivot) {
        if (pivot > max_pivots)
            throw std::runtime_error("transport_lp: pivot cap exceeded");

        for (auto& a : adj) a.clear();
        for (int b = 0; b < static_cast<int>(basis.size()); ++b) {
            adj[basis[b].i].push_back(b);
            adj[n + basis[b].j].push_back(b);
        }

        // Potentials u_i + v_j = c_ij on the basis tree.
        std::fill(seen.begin(), seen.end(), 0);
        std::queue<int> bfs;
        u[0]    = 0.0;
        seen[0] = 1;
        bfs.push(0);
        while (!bfs.empty()) {
            const int node = bfs.front();
            bfs.pop();
            for (int b : adj[node]) {
                const auto& cell = basis[b];
                const int other  = node < n ? n + cell.j : cell.i;
                if (seen[other]) continue;
                seen[other] = 1;
                if (other < n)
                    u[other] = c(cell.i, cell.j) - v[cell.j];
                else
                    v[other - n] = c(cell.i, cell.j) - u[cell.i];
                bfs.push(other);
            }
        }

        // Entering arc: most negative reduced cost, lexicographic tie-break.
        int ei = -1, ej = -1;
        double best = -rc_tol;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                const double rc = c(i, j) - u[i] - v[j];
                if (rc < best) {
                    best = rc;
                    ei   = i;
                    ej   = j;
                }
            }
        if (ei < 0) break; // optimal

        // Unique tree path from row ei to column ej.
        std::fill(seen.begin(), seen.end(), 0);
        std::fill(parent.begin(), parent.end(), -1);
        bfs.push(ei);
        seen[ei] = 1;
        while (!bfs.empty()) {
            const int node = bfs.front();
            bfs.pop();
            if (node == n + ej) break;
            for (int b : adj[node]) {
                const auto& cell = basis[b];
                const int other  = node < n ? n + cell.j : cell.i;
                if (seen[other]) continue;
                seen[other]        = 1;
                parent[other]      = node;
                parent_cell[other] = b;
                bfs.push(other);
            }
        }

        // Walk back from column ej; path arcs alternate -theta, +theta.
        std::vector<int> path;
        for (int node = n + ej; node != ei; node = parent[node])
            path.push_back(parent_cell[node]);

        double theta  = kInf;
        int leave_pos = -1;
        for (std::size_t t = 0; t < path.size(); t += 2) {
            if (basis[path[t]].flow < theta) {
                theta     = basis[path[t]].flow;
                leave_pos = static_cast<int>(t);
            }
        }
        for (std::size_t t = 0; t < path.size(); ++t)
            basis[path[t]].flow += (t % 2 == 0) ? -theta : theta;
        basis[path[leave_pos]] = {ei, ej, theta};
    }

    TransportSolution sol;
    for (const auto& cell : basis) {
        if (cell.flow > 0.0) {
            sol.value += cell.flow * c(cell.i, cell.j);
            sol.flows.emplace_back(cell.i, cell.j, cell.flow);
        }
    }
    return sol;
}

ConeOtResult wasserstein_cone(const ConeMeasure& lam0in, const ConeMeasure& lam1in,
                              const Params& p) {
    const ConeMeasure lam0 = lam0in.canonical();
    const ConeMeasure lam1 = lam1in.canonical();

    ConeOtResult res;
    const double w0 = lam0.total_weight();
    const double w1 = lam1.total_weight();
    const double scale = std::max({w0, w1, 1.0});
    if (std::abs(w0 - w1) > 1e-12 * scale) {
        res.value = kInf;
        return res;
    }
    res.balanced = true;
    if (lam0.atoms.empty() || lam1.atoms.empty()) return res;

    const int n = static_cast<int>(lam0.atoms.size());
    const int m = static_cast<int>(lam1.atoms.size());
    std::vector<double> supply(n), demand(m), cost(static_cast<std::size_t>(n) * m);
    for (int i = 0; i < n; ++i) supply[i] = lam0.atoms[i].w;
    // Absorb the (sub-1e-12) imbalance so the LP is internally consistent.
    const double fix = w1 > 0.0 ? w0 / w1 : 1.0;
    for (int j = 0; j < m; ++j) demand[j] = lam1.atoms[j].w * fix;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            const double d = cone_dist(lam0.atoms[i].z, lam1.atoms[j].z, p);
            cost[static_cast<std::size_t>(i) * m + j] = d * d;
        }

    const TransportSolution sol = transport_lp(supply, demand, cost);
    res.value = sol.value;
    for (const auto& [i, j, g] : sol.flows)
        res.plan.add(lam0.atoms[i].z, lam1.atoms[j].z, g);
    return res;
}

double reservoir_kappa(const ConeMeasure& lam0, const ConeMeasure& lam1) {
    const double theta0 = lam0.nontip_weight();
    const double theta1 = lam1.nontip_weight();
    const double rho0   = lam0.tip_weight();
    const double rho1   = lam1.tip_weight();
    return std::max({0.0, theta1 - rho0, theta0 - rho1});
}

ConeOtResult reservoir_distance(const ConeMeasure& lam0, const ConeMeasure& lam1,
                                const Params& p) {
    const double kappa = reservoir_kappa(lam0, lam1);
    ConeMeasure a = lam0, b = lam1;
    if (kappa > 0.0) {
        a.add(ConePoint::tip(), kappa);
        b.add(ConePoint::tip(), kappa);
    }
    return wasserstein_cone(a, b, p);
}

double check_no_long_transport(const ConePlan& plan, const Params& p, double slack) {
    double mass = 0.0;
    for (const auto& e : plan.entries) {
        if (e.z0.is_tip() || e.z1.is_tip()) continue;
        const double ell = p.scaled_length(dist(e.z0.pos(), e.z1.pos()));
        if (ell > kHalfPi + slack) mass += e.g;
    }
    return mass;
}

LiftResult hk_via_lifts(const DiscreteMeasure& mu0in, const DiscreteMeasure& mu1in,
                        const EtReport& report, const Params& p) {
    const DiscreteMeasure mu0 = mu0in.merged(0.0);
    const DiscreteMeasure mu1 = mu1in.merged(0.0);
    if (static_cast<int>(mu0.atoms.size()) != report.eta.n ||
        static_cast<int>(mu1.atoms.size()) != report.eta.m)
        throw std::invalid_argument("hk_via_lifts: report does not match the measures");

    LiftResult res;
    const auto& cal = report.eta;
    for (int i = 0; i < cal.n; ++i) {
        if (cal.eta0[i] == 0.0) { // pure annihilation part at radius 1
            res.plan.add(ConePoint::at(mu0.atoms[i].x, 1.0), ConePoint::tip(),
                         mu0.atoms[i].m);
            continue;
        }
        const double r0 = std::sqrt(mu0.atoms[i].m / cal.eta0[i]);
        for (int j = 0; j < cal.m; ++j) {
            const double g = cal.at(i, j);
            if (g <= 0.0) continue;
            const double r1 = std::sqrt(mu1.atoms[j].m / cal.eta1[j]);
            res.plan.add(ConePoint::at(mu0.atoms[i].x, r0),
                         ConePoint::at(mu1.atoms[j].x, r1), g);
        }
    }
    for (int j = 0; j < cal.m; ++j)
        if (cal.eta1[j] == 0.0)
            res.plan.add(ConePoint::tip(), ConePoint::at(mu1.atoms[j].x, 1.0),
                         mu1.atoms[j].m);

    res.value = res.plan.cone_cost(p);
    const double scale = 1.0 + std::abs(report.value);
    if (std::abs(res.value - report.value) > 2.0 * tol::solver_tol * scale)
        throw ValueMismatch("hk_via_lifts: cone cost disagrees with the ET value");
    return res;
}

} // namespace hk
