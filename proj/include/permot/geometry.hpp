#pragma once

#include <optional>
#include <string>
#include <vector>

#include "permot/common.hpp"

namespace permot::geometry {

struct Halfspace {
    Point normal;   // a
    double offset;  // b, constraint a.x <= b
};

// Target convex body P in R^n, n in {1,2,3}. At least one of the two
// representations is given at construction; the other is derived. The origin
// must be an interior point (standing assumption of the whole artifact).
class ConvexBody {
public:
    ConvexBody() = default;  // empty placeholder; factories build real bodies

    static ConvexBody from_vertices(int dim, std::vector<Point> vertices);
    static ConvexBody from_halfspaces(int dim, std::vector<Halfspace> halfspaces);
    static ConvexBody from_both(int dim, std::vector<Point> vertices,
                                std::vector<Halfspace> halfspaces);

    // Axis-aligned box [lo1,hi1] x ... ; convenience used all over the tests.
    static ConvexBody box(const std::vector<double>& lo, const std::vector<double>& hi);
    static ConvexBody interval(double lo, double hi) { return box({lo}, {hi}); }

    int dim() const { return dim_; }
    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }

    double support(const Point& x) const;
    bool contains(const Point& p, double tol = 1e-12) const;
    double volume() const { return volume_; }
    Point barycenter() const { return barycenter_; }

    // ||q|| / ||q - b|| for b the barycenter and q the boundary point on the
    // ray from b through the origin; 1 exactly when b = 0.
    double invariant_r() const;

    double diameter() const;

private:
    void finish_construction();

    int dim_ = 0;
    std::vector<Point> vertices_;
    std::vector<Halfspace> halfspaces_;
    double volume_ = 0.0;
    Point barycenter_;
};

// The ordered lattice points of kP ("momenta" p_1..p_N) with the scale k.
struct LatticeCloud {
    int dim = 1;
    int k = 1;
    std::vector<Point> points;  // integer vectors in kP, lexicographic order

    int size() const { return static_cast<int>(points.size()); }
    // The rational target point p_j / k inside P.
    Point scaled(int j) const { return (1.0 / k) * points[size_t(j)]; }
};

LatticeCloud lattice_points(const ConvexBody& body, int k);

ConvexBody body_from_json_file(const std::string& path);
ConvexBody body_from_json_text(const std::string& text);

}  // namespace permot::geometry
