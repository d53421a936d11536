#pragma once

#include <functional>
#include <vector>

#include "permot/common.hpp"
#include "permot/geometry.hpp"

namespace permot::assign {

// Dense N x N cost table; entries must be finite (forbidden assignments are
// rejected rather than modelled as +inf).
struct CostMatrix {
    int n = 0;
    std::vector<double> c;  // row-major

    double& at(int i, int j) { return c[size_t(i) * size_t(n) + size_t(j)]; }
    double at(int i, int j) const { return c[size_t(i) * size_t(n) + size_t(j)]; }

    static CostMatrix zeros(int n) { return CostMatrix{n, std::vector<double>(size_t(n) * size_t(n), 0.0)}; }
};

struct AssignmentResult {
    std::vector<int> sigma;  // sigma[i] = assigned column of row i
    double total = 0.0;
    double normalized = 0.0;  // total / N, the normalized cost C(sigma)
    std::vector<double> row_dual;
    std::vector<double> col_dual;
};

// Globally optimal assignment (Jonker-Volgenant shortest augmenting paths);
// ties resolved to the lexicographically smallest optimal permutation.
// Dual feasibility and complementary slackness are asserted on every solve.
AssignmentResult min_cost_assignment(const CostMatrix& cost);

// Independent check oracle: exhaustive enumeration, N <= 10.
AssignmentResult min_cost_assignment_bruteforce(const CostMatrix& cost);

struct KantorovichResult {
    double value = 0.0;              // optimal of sum c_ij G_ij with G doubly stochastic / N
    std::vector<double> coupling;    // row-major N x N, rows and columns sum to 1/N
};

// The assignment LP over the scaled Birkhoff polytope, solved independently by
// the transportation simplex; Birkhoff-von Neumann makes it match the
// permutation optimum exactly.
KantorovichResult kantorovich_lp(const CostMatrix& cost);

// Exact Wasserstein-1 between two empirical measures with equal particle
// counts: min over permutations of the mean pairwise distance.
double wasserstein1(const Configuration& a, const Configuration& b);

// Semi-discrete transport cost surrogate: samples against the lattice cloud of
// kP with cost c(x, p/k) = -x.(p/k) + phi0(x), normalized by N. The cloud
// stands in for lambda_P with O(1/k) bias.
double semidiscrete_cost(const Configuration& samples, const geometry::LatticeCloud& cloud,
                         const std::function<double(const Point&)>& weight);

}  // namespace permot::assign
