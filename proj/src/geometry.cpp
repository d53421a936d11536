#include "permot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace permot::geometry {

namespace {

constexpr double kGeomTol = 1e-9;

double cross2(const Point& o, const Point& a, const Point& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Andrew monotone chain; returns hull in counter-clockwise order.
std::vector<Point> hull2d(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), lex_less);
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point& a, const Point& b) { return dist(a, b) < 1e-12; }),
              pts.end());
    if (pts.size() <= 2) return pts;
    std::vector<Point> h(2 * pts.size());
    size_t k = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross2(h[k - 2], h[k - 1], pts[i]) <= 1e-14) --k;
        h[k++] = pts[i];
    }
    size_t lower = k + 1;
    for (size_t i = pts.size() - 1; i-- > 0;) {
        while (k >= lower && cross2(h[k - 2], h[k - 1], pts[i]) <= 1e-14) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

Point cross3(const Point& a, const Point& b) {
    return Point(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                 a[0] * b[1] - a[1] * b[0]);
}

struct Facet3 {
    Halfspace plane;
    std::vector<Point> polygon;  // vertices on the facet, cyclically ordered
};

// Facets of conv(pts) by supporting-plane search over vertex triples; fine at
// desk scale (spec caps everything at n <= 3 and small vertex counts).
std::vector<Facet3> facets3d(const std::vector<Point>& pts) {
    std::vector<Facet3> facets;
    const size_t m = pts.size();
    for (size_t i = 0; i < m; ++i)
        for (size_t j = i + 1; j < m; ++j)
            for (size_t l = j + 1; l < m; ++l) {
                Point nrm = cross3(pts[j] - pts[i], pts[l] - pts[i]);
                double len = norm(nrm);
                if (len < 1e-12) continue;
                nrm = (1.0 / len) * nrm;
                double off = dot(nrm, pts[i]);
                bool below = true, above = true;
                for (const Point& q : pts) {
                    double s = dot(nrm, q) - off;
                    if (s > kGeomTol) below = false;
                    if (s < -kGeomTol) above = false;
                }
                if (!below && !above) continue;
                if (above) {  // flip so the body is on the <= side
                    nrm = -1.0 * nrm;
                    off = -off;
                }
                bool dup = false;
                for (const Facet3& f : facets)
                    if (dist(f.plane.normal, nrm) < 1e-7 &&
                        std::fabs(f.plane.offset - off) < 1e-7) {
                        dup = true;
                        break;
                    }
                if (dup) continue;
                Facet3 f;
                f.plane = {nrm, off};
                for (const Point& q : pts)
                    if (std::fabs(dot(nrm, q) - off) <= kGeomTol) f.polygon.push_back(q);
                // order the facet polygon around its centroid
                Point centroid = Point::zero(3);
                for (const Point& q : f.polygon) centroid = centroid + q;
                centroid = (1.0 / double(f.polygon.size())) * centroid;
                Point u = f.polygon[0] - centroid;
                u = (1.0 / std::max(norm(u), 1e-300)) * u;
                Point v = cross3(nrm, u);
                std::sort(f.polygon.begin(), f.polygon.end(),
                          [&](const Point& a, const Point& b) {
                              Point da = a - centroid, db = b - centroid;
                              return std::atan2(dot(da, v), dot(da, u)) <
                                     std::atan2(dot(db, v), dot(db, u));
                          });
                facets.push_back(std::move(f));
            }
    return facets;
}

std::vector<Point> dedupe(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), lex_less);
    std::vector<Point> out;
    for (const Point& p : pts) {
        if (out.empty() || dist(out.back(), p) > 1e-9) out.push_back(p);
    }
    return out;
}

}  // namespace

ConvexBody ConvexBody::from_vertices(int dim, std::vector<Point> vertices) {
    ConvexBody body;
    body.dim_ = dim;
    body.vertices_ = std::move(vertices);
    body.finish_construction();
    return body;
}

ConvexBody ConvexBody::from_halfspaces(int dim, std::vector<Halfspace> halfspaces) {
    ConvexBody body;
    body.dim_ = dim;
    body.halfspaces_ = std::move(halfspaces);
    body.finish_construction();
    return body;
}

ConvexBody ConvexBody::from_both(int dim, std::vector<Point> vertices,
                                 std::vector<Halfspace> halfspaces) {
    ConvexBody body;
    body.dim_ = dim;
    body.vertices_ = std::move(vertices);
    body.halfspaces_ = std::move(halfspaces);
    body.finish_construction();
    return body;
}

ConvexBody ConvexBody::box(const std::vector<double>& lo, const std::vector<double>& hi) {
    int n = static_cast<int>(lo.size());
    std::vector<Point> verts;
    int corners = 1 << n;
    for (int mask = 0; mask < corners; ++mask) {
        Point p = Point::zero(n);
        for (int i = 0; i < n; ++i) p[i] = (mask >> i & 1) ? hi[size_t(i)] : lo[size_t(i)];
        verts.push_back(p);
    }
    return from_vertices(n, std::move(verts));
}

void ConvexBody::finish_construction() {
    if (dim_ < 1 || dim_ > 3)
        throw invalid_input("ConvexBody: dimension must be 1, 2 or 3, got " +
                            std::to_string(dim_));
    if (vertices_.empty() && halfspaces_.empty())
        throw invalid_input("ConvexBody: need vertices or halfspaces");
    for (auto& v : vertices_) v.dim = dim_;
    for (auto& h : halfspaces_) h.normal.dim = dim_;

    const bool had_vertices = !vertices_.empty();
    const bool had_halfspaces = !halfspaces_.empty();

    // Derive vertices from the H-representation when missing.
    if (!had_vertices) {
        std::vector<Point> cand;
        const auto& hs = halfspaces_;
        auto feasible = [&](const Point& p) {
            for (const auto& h : hs)
                if (dot(h.normal, p) > h.offset + kGeomTol) return false;
            return true;
        };
        if (dim_ == 1) {
            for (const auto& h : hs) {
                if (std::fabs(h.normal[0]) < 1e-14) continue;
                Point p(h.offset / h.normal[0]);
                if (feasible(p)) cand.push_back(p);
            }
        } else if (dim_ == 2) {
            for (size_t i = 0; i < hs.size(); ++i)
                for (size_t j = i + 1; j < hs.size(); ++j) {
                    double a1 = hs[i].normal[0], b1 = hs[i].normal[1];
                    double a2 = hs[j].normal[0], b2 = hs[j].normal[1];
                    double det = a1 * b2 - a2 * b1;
                    if (std::fabs(det) < 1e-12) continue;
                    Point p((hs[i].offset * b2 - hs[j].offset * b1) / det,
                            (a1 * hs[j].offset - a2 * hs[i].offset) / det);
                    if (feasible(p)) cand.push_back(p);
                }
        } else {
            for (size_t i = 0; i < hs.size(); ++i)
                for (size_t j = i + 1; j < hs.size(); ++j)
                    for (size_t l = j + 1; l < hs.size(); ++l) {
                        // Cramer solve of the 3x3 system
                        const Point& a = hs[i].normal;
                        const Point& b = hs[j].normal;
                        const Point& c = hs[l].normal;
                        double det = dot(a, cross3(b, c));
                        if (std::fabs(det) < 1e-12) continue;
                        Point rhs(hs[i].offset, hs[j].offset, hs[l].offset);
                        Point col;
                        Point p = Point::zero(3);
                        for (int t = 0; t < 3; ++t) {
                            Point aa = a, bb = b, cc = c;
                            aa[t] = rhs[0];
                            bb[t] = rhs[1];
                            cc[t] = rhs[2];
                            (void)col;
                            p[t] = dot(aa, cross3(bb, cc)) / det;
                        }
                        if (feasible(p)) cand.push_back(p);
                    }
        }
        vertices_ = dedupe(std::move(cand));
        if (vertices_.empty())
            throw invalid_input("ConvexBody: halfspace system has no vertices (empty or unbounded)");
    }

    // Derive halfspaces from the V-representation when missing.
    if (!had_halfspaces) {
        if (dim_ == 1) {
            double lo = kInf, hi = -kInf;
            for (const auto& v : vertices_) {
                lo = std::min(lo, v[0]);
                hi = std::max(hi, v[0]);
            }
            halfspaces_ = {{Point(1.0), hi}, {Point(-1.0), -lo}};
        } else if (dim_ == 2) {
            auto hull = hull2d(vertices_);
            if (hull.size() < 3) throw invalid_input("ConvexBody: 2d body has empty interior");
            for (size_t i = 0; i < hull.size(); ++i) {
                const Point& a = hull[i];
                const Point& b = hull[(i + 1) % hull.size()];
                Point nrm(b[1] - a[1], a[0] - b[0]);  // outward for CCW order
                double len = norm(nrm);
                nrm = (1.0 / len) * nrm;
                halfspaces_.push_back({nrm, dot(nrm, a)});
            }
        } else {
            auto facets = facets3d(vertices_);
            if (facets.empty()) throw invalid_input("ConvexBody: 3d body has empty interior");
            for (const auto& f : facets) halfspaces_.push_back(f.plane);
        }
    }

    // The origin must lie in P (boundary allowed; invariant_r additionally
    // needs strict interiority and checks it itself), and P must be bounded.
    for (const auto& h : halfspaces_)
        if (h.offset < -1e-12)
            throw invalid_input("ConvexBody: the origin must lie in the body");
    {
        int samples = dim_ == 1 ? 2 : (dim_ == 2 ? 720 : 2000);
        for (int s = 0; s < samples; ++s) {
            Point d = Point::zero(dim_);
            if (dim_ == 1) {
                d[0] = s == 0 ? 1.0 : -1.0;
            } else if (dim_ == 2) {
                double a = 2.0 * M_PI * s / samples;
                d = Point(std::cos(a), std::sin(a));
            } else {
                double u = -1.0 + 2.0 * (s + 0.5) / samples;
                double a = 2.39996322972865332 * s;  // golden spiral
                double r = std::sqrt(std::max(0.0, 1.0 - u * u));
                d = Point(r * std::cos(a), r * std::sin(a), u);
            }
            double best = -kInf;
            for (const auto& h : halfspaces_) best = std::max(best, dot(h.normal, d));
            if (best <= 1e-10)
                throw invalid_input("ConvexBody: representation describes an unbounded set");
        }
    }

    // Cross-validate the two representations when both were supplied.
    if (had_vertices && had_halfspaces) {
        for (const auto& v : vertices_)
            for (const auto& h : halfspaces_)
                if (dot(h.normal, v) > h.offset + kGeomTol)
                    throw invalid_input("ConvexBody: vertex violates a supplied halfspace");
    }

    // Volume and barycenter by exact decomposition.
    if (dim_ == 1) {
        double lo = kInf, hi = -kInf;
        for (const auto& v : vertices_) {
            lo = std::min(lo, v[0]);
            hi = std::max(hi, v[0]);
        }
        volume_ = hi - lo;
        barycenter_ = Point(0.5 * (lo + hi));
    } else if (dim_ == 2) {
        auto hull = hull2d(vertices_);
        double area2 = 0.0, cx = 0.0, cy = 0.0;
        for (size_t i = 0; i < hull.size(); ++i) {
            const Point& a = hull[i];
            const Point& b = hull[(i + 1) % hull.size()];
            double w = a[0] * b[1] - b[0] * a[1];
            area2 += w;
            cx += (a[0] + b[0]) * w;
            cy += (a[1] + b[1]) * w;
        }
        volume_ = 0.5 * area2;
        barycenter_ = Point(cx / (3.0 * area2), cy / (3.0 * area2));
    } else {
        auto facets = facets3d(vertices_);
        double vol = 0.0;
        Point bary = Point::zero(3);
        for (const auto& f : facets) {
            for (size_t t = 1; t + 1 < f.polygon.size(); ++t) {
                const Point& a = f.polygon[0];
                const Point& b = f.polygon[t];
                const Point& c = f.polygon[t + 1];
                double v6 = dot(a, cross3(b, c));  // tet with apex at the origin
                vol += v6 / 6.0;
                Point centroid = 0.25 * (a + b + c);  // + origin
                bary = bary + (v6 / 6.0) * centroid;
            }
        }
        vol = std::fabs(vol);
        volume_ = vol;
        barycenter_ = (1.0 / vol) * bary;
    }
    if (volume_ <= 1e-12) throw invalid_input("ConvexBody: empty interior (zero volume)");
}

double ConvexBody::support(const Point& x) const {
    double best = -kInf;
    for (const auto& v : vertices_) best = std::max(best, dot(x, v));
    return best;
}

bool ConvexBody::contains(const Point& p, double tol) const {
    for (const auto& h : halfspaces_)
        if (dot(h.normal, p) > h.offset + tol) return false;
    return true;
}

double ConvexBody::invariant_r() const {
    for (const auto& h : halfspaces_)
        if (h.offset <= 1e-10)
            throw invalid_input("invariant_r: needs the origin strictly interior to P");
    Point b = barycenter_;
    if (norm(b) <= 1e-10) return 1.0;
    // Ray b + t(-b), t >= 0 exits P at q; with 0 interior the exit has t > 1.
    double t_exit = kInf;
    for (const auto& h : halfspaces_) {
        double denom = dot(h.normal, -1.0 * b);
        if (denom <= 1e-14) continue;
        double t = (h.offset - dot(h.normal, b)) / denom;
        t_exit = std::min(t_exit, t);
    }
    Point q = b + t_exit * (-1.0 * b);
    return norm(q) / norm(q - b);
}

double ConvexBody::diameter() const {
    double d = 0.0;
    for (size_t i = 0; i < vertices_.size(); ++i)
        for (size_t j = i + 1; j < vertices_.size(); ++j)
            d = std::max(d, dist(vertices_[i], vertices_[j]));
    return d;
}

LatticeCloud lattice_points(const ConvexBody& body, int k) {
    if (k < 1) throw invalid_input("lattice_points: k must be >= 1");
    const int n = body.dim();
    std::array<long, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int i = 0; i < n; ++i) {
        Point e = Point::zero(n), me = Point::zero(n);
        e[i] = 1.0;
        me[i] = -1.0;
        hi[size_t(i)] = long(std::floor(k * body.support(e) + 1e-9));
        lo[size_t(i)] = long(-std::floor(k * body.support(me) + 1e-9));
    }
    LatticeCloud cloud;
    cloud.dim = n;
    cloud.k = k;
    // Bounding-box scan + membership; boundary points count as inside.
    std::array<long, 3> idx = lo;
    for (;;) {
        Point p = Point::zero(n);
        for (int i = 0; i < n; ++i) p[i] = double(idx[size_t(i)]) / k;
        if (body.contains(p, 1e-9)) {
            Point q = Point::zero(n);
            for (int i = 0; i < n; ++i) q[i] = double(idx[size_t(i)]);
            cloud.points.push_back(q);
        }
        int axis = n - 1;
        while (axis >= 0) {
            if (++idx[size_t(axis)] <= hi[size_t(axis)]) break;
            idx[size_t(axis)] = lo[size_t(axis)];
            --axis;
        }
        if (axis < 0) break;
    }
    std::sort(cloud.points.begin(), cloud.points.end(), lex_less);
    if (cloud.points.empty())
        throw invalid_input("lattice_points: kP contains no lattice points (k too small)");
    return cloud;
}

ConvexBody body_from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    int dim = j.at("dim").get<int>();
    std::vector<Point> verts;
    std::vector<Halfspace> halves;
    if (j.contains("vertices")) {
        for (const auto& row : j["vertices"]) {
            Point p = Point::zero(dim);
            for (int i = 0; i < dim; ++i) p[i] = row.at(static_cast<size_t>(i)).get<double>();
            verts.push_back(p);
        }
    }
    if (j.contains("halfspaces")) {
        for (const auto& h : j["halfspaces"]) {
            Point nrm = Point::zero(dim);
            for (int i = 0; i < dim; ++i) nrm[i] = h.at("normal").at(static_cast<size_t>(i)).get<double>();
            halves.push_back({nrm, h.at("offset").get<double>()});
        }
    }
    if (!verts.empty() && !halves.empty())
        return ConvexBody::from_both(dim, std::move(verts), std::move(halves));
    if (!verts.empty()) return ConvexBody::from_vertices(dim, std::move(verts));
    return ConvexBody::from_halfspaces(dim, std::move(halves));
}

ConvexBody body_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open body file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return body_from_json_text(ss.str());
}

}  // namespace permot::geometry
