#pragma once

#include "permot/geometry.hpp"
#include "permot/grid.hpp"

namespace permot::convexcalc {

using grid::Axis;
using grid::ConvexGridFunction;
using grid::DiscreteMeasure;
using grid::GridFunction;

// phi*(p) = max over X-grid nodes of x.p - phi(x), sampled on the given
// target grid. +inf nodes of phi are skipped; argmax ties resolve to the
// lexicographically smallest node.
GridFunction legendre(const GridFunction& phi, const GridFunction& target_grid);

// Convenience: 1d Legendre transform onto a uniform p-grid.
GridFunction legendre1d(const GridFunction& phi, Axis p_axis);

// Constrained convex envelope Pi_X(phi0) as a double Legendre transform with
// the dual domain clamped to P. The mask is carried by +inf nodes of phi0.
// dual_count controls the P-grid resolution per axis.
ConvexGridFunction envelope(const GridFunction& phi0, const geometry::ConvexBody& body,
                            int dual_count = 1025);

// Alexandrov Monge-Ampere measure over a cell partition of the window.
// 1d: exact via subgradient intervals (central slopes at breakpoints, the
// declared extension rule at the window ends). 2d: dual counting against a
// fine grid on P; each dual node deposits vol(P)/#nodes into the cell whose
// node maximizes x.p - phi(x).
DiscreteMeasure ma_measure(const ConvexGridFunction& phi, const std::vector<double>& breaks_1d,
                           const geometry::ConvexBody* clamp_to = nullptr);
DiscreteMeasure ma_measure2d(const ConvexGridFunction& phi, const geometry::ConvexBody& body,
                             int dual_count = 257);

// Total subgradient-image mass over the window; boundary subgradients clamped
// to P when a body is supplied (the P_+ reading of the window restriction).
double ma_total_mass(const ConvexGridFunction& phi, const geometry::ConvexBody* clamp_to = nullptr);

// E(phi) = -integral over P of phi* d(lambda_P), lambda_P normalized to a
// probability measure; E(phi_P) = 0.
double energy(const ConvexGridFunction& phi, const geometry::ConvexBody& body,
              int quad_count = 2001);

struct ComparisonReport {
    double lhs = 0.0;  // MA(v) mass of {u < v}
    double rhs = 0.0;  // MA(u) mass of {u < v}
    bool holds = false;
    bool applicable = true;  // both full mass on the window
};

// Appendix comparison principle on 1d grids; masses over the closure of the
// strict sublevel runs so boundary kink atoms land where the worked example
// puts them.
ComparisonReport check_comparison(const ConvexGridFunction& u, const ConvexGridFunction& v,
                                  const geometry::ConvexBody& body);

struct DominationReport {
    bool hypothesis = false;   // u >= v on the MA(u)-carrying nodes
    bool conclusion = false;   // u >= v everywhere
    int first_violation = -1;  // node index when the conclusion fails
};

DominationReport check_domination(const ConvexGridFunction& u, const ConvexGridFunction& v,
                                  const geometry::ConvexBody& body);

// Nodes where the envelope touches the obstacle within tol.
std::vector<int> incidence_set(const GridFunction& phi0, const ConvexGridFunction& env,
                               double tol = 1e-6);

// Support function of P restricted to the grid window.
ConvexGridFunction support_restriction(const geometry::ConvexBody& body, Axis ax);

}  // namespace permot::convexcalc
