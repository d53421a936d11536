#include "permot/convexcalc.hpp"

#include <algorithm>
#include <cmath>

namespace permot::convexcalc {

GridFunction legendre(const GridFunction& phi, const GridFunction& target_grid) {
    GridFunction out = target_grid;
    const int m = out.node_count();
    const int n = phi.node_count();
    if (n == 0 || m == 0) throw invalid_input("legendre: empty grid");
    for (int t = 0; t < m; ++t) {
        Point p = out.node(t);
        double best = kNegInf;
        for (int i = 0; i < n; ++i) {
            double v = phi.at(i);
            if (v == kInf) continue;
            double cand = dot(phi.node(i), p) - v;
            if (cand > best) best = cand;
        }
        out.at(t) = best;
    }
    return out;
}

GridFunction legendre1d(const GridFunction& phi, Axis p_axis) {
    GridFunction target;
    target.dim = 1;
    target.ax = p_axis;
    target.values.assign(static_cast<size_t>(p_axis.count), 0.0);
    return legendre(phi, target);
}

ConvexGridFunction envelope(const GridFunction& phi0, const geometry::ConvexBody& body,
                            int dual_count) {
    bool any = false;
    for (int i = 0; i < phi0.node_count(); ++i)
        if (phi0.at(i) != kInf) any = true;
    if (!any) throw invalid_input("envelope: empty mask");

    // Dual pass: v = (phi0 on X)*, domain clamped to P by construction of the
    // dual grid; primal pass: Pi_X(phi0) = v*.
    GridFunction dual;
    if (phi0.dim == 1) {
        Point e(1.0), me(-1.0);
        dual.dim = 1;
        dual.ax = Axis{-body.support(me), body.support(e), dual_count};
        dual.values.assign(static_cast<size_t>(dual_count), 0.0);
        dual = legendre(phi0, dual);
    } else {
        Point e1(1.0, 0.0), e2(0.0, 1.0);
        Axis px{-body.support(-1.0 * e1), body.support(e1), dual_count};
        Axis py{-body.support(-1.0 * e2), body.support(e2), dual_count};
        dual.dim = 2;
        dual.ax = px;
        dual.ay = py;
        dual.values.assign(size_t(px.count) * size_t(py.count), 0.0);
        dual = legendre(phi0, dual);
        // mask dual nodes outside P (bounding box minus corners)
        for (int t = 0; t < dual.node_count(); ++t)
            if (!body.contains(dual.node(t), 1e-9)) dual.at(t) = kInf;
    }

    GridFunction env = phi0;  // same window/grid
    env = legendre(dual, env);
    return ConvexGridFunction::certify(env);
}

DiscreteMeasure ma_measure(const ConvexGridFunction& phi, const std::vector<double>& breaks,
                           const geometry::ConvexBody* clamp_to) {
    if (phi.dim != 1) throw invalid_input("ma_measure: 1d path called on 2d grid");
    if (breaks.size() < 2) throw invalid_input("ma_measure: need at least one cell");
    double p_lo = -kInf, p_hi = kInf;
    if (clamp_to) {
        p_hi = clamp_to->support(Point(1.0));
        p_lo = -clamp_to->support(Point(-1.0));
    }
    auto slope_at = [&](double x) {
        // subgradient "CDF" evaluated at an arbitrary abscissa
        const Axis& ax = phi.ax;
        if (x <= ax.lo + 1e-15) {
            double s = phi.slope_left(0);
            return std::max(s == kNegInf ? p_lo : s, p_lo);
        }
        if (x >= ax.hi - 1e-15) {
            double s = phi.slope_right(ax.count - 1);
            return std::min(s == kInf ? p_hi : s, p_hi);
        }
        int i = int(std::floor((x - ax.lo) / ax.spacing() + 0.5));
        i = std::clamp(i, 0, ax.count - 1);
        if (std::fabs(ax.node(i) - x) <= 1e-9 * std::max(1.0, std::fabs(x)))
            return std::clamp(phi.slope_central(i), p_lo, p_hi);
        // interior of a grid cell: the chord slope of that cell
        int c = int(std::floor((x - ax.lo) / ax.spacing()));
        c = std::clamp(c, 0, ax.count - 2);
        return std::clamp((phi.at(c + 1) - phi.at(c)) / ax.spacing(), p_lo, p_hi);
    };
    DiscreteMeasure mu;
    for (size_t c = 0; c + 1 < breaks.size(); ++c) {
        double a = breaks[c], b = breaks[c + 1];
        double mass = slope_at(b) - slope_at(a);
        mu.add(Point(0.5 * (a + b)), std::max(mass, 0.0));
    }
    return mu;
}

DiscreteMeasure ma_measure2d(const ConvexGridFunction& phi, const geometry::ConvexBody& body,
                             int dual_count) {
    if (phi.dim != 2) throw invalid_input("ma_measure2d: needs a 2d grid");
    Point e1(1.0, 0.0), e2(0.0, 1.0);
    Axis px{-body.support(-1.0 * e1), body.support(e1), dual_count};
    Axis py{-body.support(-1.0 * e2), body.support(e2), dual_count};

    // collect dual nodes inside P
    std::vector<Point> duals;
    for (int i = 0; i < px.count; ++i)
        for (int j = 0; j < py.count; ++j) {
            Point p(px.node(i), py.node(j));
            if (body.contains(p, 1e-9)) duals.push_back(p);
        }
    const double node_mass = body.volume() / double(duals.size());

    const int nx = phi.ax.count, ny = phi.ay.count;
    std::vector<double> cell_mass(size_t(nx - 1) * size_t(ny - 1), 0.0);
    for (const Point& p : duals) {
        double best = kNegInf;
        int best_idx = 0;
        for (int t = 0; t < phi.node_count(); ++t) {
            double v = phi.at(t);
            if (v == kInf) continue;
            double cand = dot(phi.node(t), p) - v;
            if (cand > best + 1e-15) {
                best = cand;
                best_idx = t;
            }
        }
        int ix = best_idx / ny, iy = best_idx % ny;
        ix = std::min(ix, nx - 2);
        iy = std::min(iy, ny - 2);
        cell_mass[size_t(ix) * size_t(ny - 1) + size_t(iy)] += node_mass;
    }
    DiscreteMeasure mu;
    for (int ix = 0; ix + 1 < nx; ++ix)
        for (int iy = 0; iy + 1 < ny; ++iy) {
            double m = cell_mass[size_t(ix) * size_t(ny - 1) + size_t(iy)];
            if (m > 0.0)
                mu.add(Point(0.5 * (phi.ax.node(ix) + phi.ax.node(ix + 1)),
                             0.5 * (phi.ay.node(iy) + phi.ay.node(iy + 1))),
                       m);
        }
    return mu;
}

double ma_total_mass(const ConvexGridFunction& phi, const geometry::ConvexBody* clamp_to) {
    if (phi.dim == 1) {
        double p_lo = -kInf, p_hi = kInf;
        if (clamp_to) {
            p_hi = clamp_to->support(Point(1.0));
            p_lo = -clamp_to->support(Point(-1.0));
        }
        double s_hi = phi.slope_right(phi.ax.count - 1);
        double s_lo = phi.slope_left(0);
        s_hi = std::min(s_hi == kInf ? p_hi : s_hi, p_hi);
        s_lo = std::max(s_lo == kNegInf ? p_lo : s_lo, p_lo);
        return s_hi - s_lo;
    }
    if (!clamp_to) throw invalid_input("ma_total_mass: 2d path needs the body");
    DiscreteMeasure mu = ma_measure2d(phi, *clamp_to);
    return mu.total();
}

double energy(const ConvexGridFunction& phi, const geometry::ConvexBody& body, int quad_count) {
    if (phi.dim == 1) {
        Point e(1.0), me(-1.0);
        Axis pax{-body.support(me), body.support(e), quad_count};
        GridFunction dual = legendre1d(phi, pax);
        double h = pax.spacing();
        double integral = 0.0;
        for (int i = 0; i + 1 < pax.count; ++i)
            integral += 0.5 * h * (dual.at(i) + dual.at(i + 1));
        return -integral / body.volume();
    }
    // 2d: trapezoid over the bounding box restricted to P
    Point e1(1.0, 0.0), e2(0.0, 1.0);
    int q = std::max(33, int(std::sqrt(double(quad_count))));
    Axis px{-body.support(-1.0 * e1), body.support(e1), q};
    Axis py{-body.support(-1.0 * e2), body.support(e2), q};
    double integral = 0.0, covered = 0.0;
    double cell = px.spacing() * py.spacing();
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
            Point p(px.node(i), py.node(j));
            if (!body.contains(p, 1e-9)) continue;
            double w = ((i == 0 || i == q - 1) ? 0.5 : 1.0) * ((j == 0 || j == q - 1) ? 0.5 : 1.0);
            double best = kNegInf;
            for (int t = 0; t < phi.node_count(); ++t) {
                if (phi.at(t) == kInf) continue;
                best = std::max(best, dot(phi.node(t), p) - phi.at(t));
            }
            integral += w * cell * best;
            covered += w * cell;
        }
    // renormalize the quadrature cells that actually landed in P
    return -integral / covered;
}

namespace {

double run_mass(const ConvexGridFunction& w, int first, int last, const geometry::ConvexBody& body) {
    double p_hi = body.support(Point(1.0));
    double p_lo = -body.support(Point(-1.0));
    auto clamped = [&](int i) { return std::clamp(w.slope_central(i), p_lo, p_hi); };
    return clamped(last) - clamped(first);
}

}  // namespace

ComparisonReport check_comparison(const ConvexGridFunction& u, const ConvexGridFunction& v,
                                  const geometry::ConvexBody& body) {
    if (u.dim != 1 || v.dim != 1) throw invalid_input("check_comparison: 1d only");
    if (u.ax.count != v.ax.count) throw invalid_input("check_comparison: grids differ");
    ComparisonReport report;
    double vol = body.volume();
    double mu_u = ma_total_mass(u, &body), mu_v = ma_total_mass(v, &body);
    report.applicable = std::fabs(mu_u - vol) <= 0.01 * vol && std::fabs(mu_v - vol) <= 0.01 * vol;
    if (!report.applicable)
        throw invalid_input("check_comparison: inputs lack full Monge-Ampere mass on the window");

    const int n = u.ax.count;
    // maximal runs of strict nodes, each extended one node into the closure
    std::vector<std::pair<int, int>> runs;
    int i = 0;
    while (i < n) {
        if (u.at(i) < v.at(i)) {
            int j = i;
            while (j + 1 < n && u.at(j + 1) < v.at(j + 1)) ++j;
            runs.emplace_back(std::max(0, i - 1), std::min(n - 1, j + 1));
            i = j + 1;
        } else {
            ++i;
        }
    }
    // merge overlaps
    std::vector<std::pair<int, int>> merged;
    for (auto& r : runs) {
        if (!merged.empty() && r.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, r.second);
        else
            merged.push_back(r);
    }
    for (auto& r : merged) {
        report.lhs += run_mass(v, r.first, r.second, body);
        report.rhs += run_mass(u, r.first, r.second, body);
    }
    report.holds = report.lhs <= report.rhs + 1e-8;
    return report;
}

DominationReport check_domination(const ConvexGridFunction& u, const ConvexGridFunction& v,
                                  const geometry::ConvexBody& body) {
    if (u.dim != 1) throw invalid_input("check_domination: 1d only");
    DominationReport report;
    const int n = u.ax.count;
    std::vector<double> breaks(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) breaks[size_t(i)] = u.ax.node(i);
    DiscreteMeasure ma_u = ma_measure(u, breaks, &body);
    const double eps = 1e-10 * body.volume();
    report.hypothesis = true;
    for (size_t c = 0; c < ma_u.mass.size(); ++c) {
        if (ma_u.mass[c] <= eps) continue;
        // cell c spans nodes c..c+1
        for (int i = int(c); i <= int(c) + 1; ++i)
            if (u.at(i) < v.at(i) - 1e-9) report.hypothesis = false;
    }
    report.conclusion = true;
    for (int i = 0; i < n; ++i)
        if (u.at(i) < v.at(i) - 1e-9) {
            report.conclusion = false;
            report.first_violation = i;
            break;
        }
    return report;
}

std::vector<int> incidence_set(const GridFunction& phi0, const ConvexGridFunction& env,
                               double tol) {
    std::vector<int> nodes;
    for (int i = 0; i < phi0.node_count(); ++i) {
        if (phi0.at(i) == kInf) continue;
        if (env.at(i) >= phi0.at(i) - tol) nodes.push_back(i);
    }
    return nodes;
}

ConvexGridFunction support_restriction(const geometry::ConvexBody& body, Axis ax) {
    GridFunction g = GridFunction::sample1d(ax, [&](double x) { return body.support(Point(x)); });
    return ConvexGridFunction::certify(g);
}

}  // namespace permot::convexcalc
