#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "permot/common.hpp"

namespace permot {

// Tiny expression language for weights and densities: numbers, variables
// x (alias x1), x2, x3, + - * / ^, abs(e), exp(e), log(e), min/max(a,b),
// parentheses. Parsed once, evaluated per point.
class Expr {
public:
    static Expr parse(const std::string& text);

    double eval(const Point& p) const;
    double eval1(double x) const { return eval(Point(x)); }

    // Central-difference gradient; the language stays evaluation-only.
    Point grad(const Point& p, double h = 1e-5) const;

    const std::string& text() const { return text_; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace permot
