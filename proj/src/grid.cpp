#include "permot/grid.hpp"

namespace permot::grid {

GridFunction GridFunction::sample1d(Axis ax, const std::function<double(double)>& f) {
    if (ax.count < 2 || ax.hi <= ax.lo) throw invalid_input("GridFunction: bad axis");
    GridFunction g;
    g.dim = 1;
    g.ax = ax;
    g.values.resize(static_cast<size_t>(ax.count));
    for (int i = 0; i < ax.count; ++i) g.values[size_t(i)] = f(ax.node(i));
    return g;
}

GridFunction GridFunction::sample2d(Axis ax, Axis ay,
                                    const std::function<double(const Point&)>& f) {
    if (ax.count < 2 || ay.count < 2) throw invalid_input("GridFunction: bad axis");
    GridFunction g;
    g.dim = 2;
    g.ax = ax;
    g.ay = ay;
    g.values.resize(size_t(ax.count) * size_t(ay.count));
    for (int i = 0; i < ax.count; ++i)
        for (int j = 0; j < ay.count; ++j)
            g.values[size_t(i) * size_t(ay.count) + size_t(j)] = f(Point(ax.node(i), ay.node(j)));
    return g;
}

Point GridFunction::node(int idx) const {
    if (dim == 1) return Point(ax.node(idx));
    return Point(ax.node(idx / ay.count), ay.node(idx % ay.count));
}

double GridFunction::slope_left(int i) const {
    double h = ax.spacing();
    if (i == 0) {
        if (extension == Extension::PlusInf) return kNegInf;
        return (values[1] - values[0]) / h;  // affine continuation
    }
    return (values[size_t(i)] - values[size_t(i) - 1]) / h;
}

double GridFunction::slope_right(int i) const {
    double h = ax.spacing();
    if (i == ax.count - 1) {
        if (extension == Extension::PlusInf) return kInf;
        return (values[size_t(i)] - values[size_t(i) - 1]) / h;
    }
    return (values[size_t(i) + 1] - values[size_t(i)]) / h;
}

double GridFunction::slope_central(int i) const {
    if (i == 0) return slope_left(0) == kNegInf ? slope_right(0) : slope_left(0);
    if (i == ax.count - 1)
        return slope_right(i) == kInf ? slope_left(i) : slope_right(i);
    return (values[size_t(i) + 1] - values[size_t(i) - 1]) / (2.0 * ax.spacing());
}

ConvexGridFunction ConvexGridFunction::certify(const GridFunction& g) {
    constexpr double tol = 1e-9;
    if (g.dim == 1) {
        for (int i = 1; i + 1 < g.ax.count; ++i) {
            double d2 = g.at(i - 1) - 2.0 * g.at(i) + g.at(i + 1);
            if (d2 < -tol * std::max(1.0, std::fabs(g.at(i))))
                throw invalid_input("ConvexGridFunction: second difference negative at node " +
                                    std::to_string(i));
        }
    } else {
        for (int i = 0; i < g.ax.count; ++i)
            for (int j = 0; j < g.ay.count; ++j) {
                if (i >= 1 && i + 1 < g.ax.count) {
                    double d2 = g.at2(i - 1, j) - 2.0 * g.at2(i, j) + g.at2(i + 1, j);
                    if (d2 < -tol * std::max(1.0, std::fabs(g.at2(i, j))))
                        throw invalid_input("ConvexGridFunction: non-convex along x1");
                }
                if (j >= 1 && j + 1 < g.ay.count) {
                    double d2 = g.at2(i, j - 1) - 2.0 * g.at2(i, j) + g.at2(i, j + 1);
                    if (d2 < -tol * std::max(1.0, std::fabs(g.at2(i, j))))
                        throw invalid_input("ConvexGridFunction: non-convex along x2");
                }
            }
    }
    ConvexGridFunction out;
    static_cast<GridFunction&>(out) = g;
    return out;
}

}  // namespace permot::grid
