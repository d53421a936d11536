#pragma once

#include <functional>
#include <vector>

#include "permot/common.hpp"

namespace permot::grid {

enum class Extension { Affine, PlusInf };

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    int count = 2;

    double spacing() const { return (hi - lo) / (count - 1); }
    double node(int i) const { return lo + i * spacing(); }
};

// Sampled function on a regular axis-aligned grid over a window of R^n,
// n <= 2. Nodes may carry +inf to mark exclusion masks.
struct GridFunction {
    int dim = 1;
    Axis ax;  // first axis
    Axis ay;  // second axis (dim == 2 only)
    std::vector<double> values;
    Extension extension = Extension::Affine;

    static GridFunction sample1d(Axis ax, const std::function<double(double)>& f);
    static GridFunction sample2d(Axis ax, Axis ay, const std::function<double(const Point&)>& f);

    int node_count() const { return dim == 1 ? ax.count : ax.count * ay.count; }
    Point node(int idx) const;
    double& at(int idx) { return values[size_t(idx)]; }
    double at(int idx) const { return values[size_t(idx)]; }
    double at2(int ix, int iy) const { return values[size_t(ix) * size_t(ay.count) + size_t(iy)]; }

    double max_spacing() const { return dim == 1 ? ax.spacing() : std::max(ax.spacing(), ay.spacing()); }

    // One-sided and central slopes (1d): index i in [0, count).
    double slope_left(int i) const;
    double slope_right(int i) const;
    double slope_central(int i) const;
};

// GridFunction plus a discrete convexity certificate established at
// construction: second differences along grid lines >= -1e-9.
struct ConvexGridFunction : GridFunction {
    static ConvexGridFunction certify(const GridFunction& g);
};

struct DiscreteMeasure {
    std::vector<Point> support;
    std::vector<double> mass;

    double total() const {
        double s = 0.0;
        for (double m : mass) s += m;
        return s;
    }
    void add(const Point& p, double m) {
        support.push_back(p);
        mass.push_back(m);
    }
};

}  // namespace permot::grid
