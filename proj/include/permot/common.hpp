#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace permot {

// Spatial dimension is 1, 2 or 3 throughout; points carry their dimension.
struct Point {
    int dim = 1;
    std::array<double, 3> c{0.0, 0.0, 0.0};

    Point() = default;
    explicit Point(double x) : dim(1), c{x, 0.0, 0.0} {}
    Point(double x, double y) : dim(2), c{x, y, 0.0} {}
    Point(double x, double y, double z) : dim(3), c{x, y, z} {}
    static Point zero(int n) { Point p; p.dim = n; return p; }

    double& operator[](int i) { return c[static_cast<size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<size_t>(i)]; }
};

inline double dot(const Point& a, const Point& b) {
    double s = 0.0;
    for (int i = 0; i < a.dim; ++i) s += a.c[size_t(i)] * b.c[size_t(i)];
    return s;
}

inline Point operator+(Point a, const Point& b) {
    for (int i = 0; i < a.dim; ++i) a.c[size_t(i)] += b.c[size_t(i)];
    return a;
}

inline Point operator-(Point a, const Point& b) {
    for (int i = 0; i < a.dim; ++i) a.c[size_t(i)] -= b.c[size_t(i)];
    return a;
}

inline Point operator*(double t, Point a) {
    for (int i = 0; i < a.dim; ++i) a.c[size_t(i)] *= t;
    return a;
}

inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }

inline double dist(const Point& a, const Point& b) { return norm(a - b); }

inline bool lex_less(const Point& a, const Point& b) {
    for (int i = 0; i < a.dim; ++i) {
        if (a.c[size_t(i)] < b.c[size_t(i)]) return true;
        if (a.c[size_t(i)] > b.c[size_t(i)]) return false;
    }
    return false;
}

// A particle configuration: N points in R^n.
struct Configuration {
    int dim = 1;
    std::vector<Point> x;

    int size() const { return static_cast<int>(x.size()); }
};

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Configuration / representation errors (bad bodies, size mismatches, ...).
struct invalid_input : std::runtime_error {
    explicit invalid_input(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a log-domain accumulation has lost too much precision to be
// trusted; callers must not treat this as a value.
struct precision_loss : std::runtime_error {
    explicit precision_loss(const std::string& what) : std::runtime_error(what) {}
};

// log(exp(a) + exp(b)) without overflow.
inline double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

inline double log_sum(const std::vector<double>& v) {
    double m = kNegInf;
    for (double t : v) m = std::max(m, t);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double t : v) s += std::exp(t - m);
    return m + std::log(s);
}

inline double log_mean(const std::vector<double>& v) {
    return log_sum(v) - std::log(static_cast<double>(v.size()));
}

inline double log_factorial(int n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

}  // namespace permot
