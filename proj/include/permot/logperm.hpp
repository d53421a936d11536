#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "permot/common.hpp"
#include "permot/geometry.hpp"
#include "permot/rng.hpp"

namespace permot::perm {

// Sign/log-magnitude pair; the carrier for Ryser's signed accumulation.
// sign == 0 marks an exact zero (log set to -inf).
struct SignedLog {
    int sign = 0;
    double log_abs = kNegInf;

    static SignedLog zero() { return {}; }
    static SignedLog from_log(double log_value, int sign = 1) { return {sign, log_value}; }
    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

// Adds sign*exp(log_mag) into acc, tracking the total absolute mass so that
// cancellation can be diagnosed afterwards.
void signed_accumulate(SignedLog& acc, int sign, double log_mag, double& log_abs_mass);

// N x N table of log-entries a_ij = x_i . p_j (or -beta* c(x_i, p_j/k) for
// general costs), with per-row maxima cached for stabilization.
struct LogMatrix {
    int n = 0;
    std::vector<double> a;        // row-major log entries
    std::vector<double> row_max;  // stabilization maxima

    double& at(int i, int j) { return a[size_t(i) * size_t(n) + size_t(j)]; }
    double at(int i, int j) const { return a[size_t(i) * size_t(n) + size_t(j)]; }

    static LogMatrix from_rows(int n, std::vector<double> entries);
    void refresh_row_max();
};

// Doubly stochastic marginal table M_ij = P[sigma(i) = j] under the
// permanental weighting; the ratio kernel of the transport-map corollary.
struct MarginalMatrix {
    int n = 0;
    std::vector<double> m;
    double at(int i, int j) const { return m[size_t(i) * size_t(n) + size_t(j)]; }
};

using CostFunctional = std::function<double(const Point& x, const Point& target)>;

// a_ij = x_i . p_j, or -beta_star * c(x_i, p_j/k) when a cost is supplied.
LogMatrix kernel(const Configuration& conf, const geometry::LatticeCloud& cloud,
                 const CostFunctional& cost = nullptr, double beta_star = 1.0);

// log Per by explicit permutation expansion; the oracle path, N <= 10.
double log_permanent_exact(const LogMatrix& a);

// log Per by signed log-domain Ryser with row-max prescaling, N <= 25.
// Throws precision_loss when the inclusion-exclusion cancels catastrophically.
double log_permanent(const LogMatrix& a, double rel_tol = 1e-9);

// Exact marginal matrix via N^2 minor permanents, N <= 14.
MarginalMatrix marginal_matrix(const LogMatrix& a);

// Minor vector m_j = log Per(A with row `row` and column j removed), all j at
// once in a single subset sweep; used by the row-expansion estimators.
std::vector<SignedLog> row_minors(const LogMatrix& a, int row, double rel_tol = 1e-9);

// Row `row` of the marginal matrix from precomputed minors plus the row
// entries; also returns log Per(A) reconstructed from the expansion.
struct RowExpansion {
    std::vector<double> marginal_row;
    double log_per = kNegInf;
};
RowExpansion expand_row(const std::vector<double>& row_entries,
                        const std::vector<SignedLog>& minors);

// d log Per / d x_i = sum_j p_j M_ij; every vector lies in kP.
std::vector<Point> grad_log_permanent(const Configuration& conf,
                                      const geometry::LatticeCloud& cloud);

// H = -(1/k) log Per(kernel) + sum_i phi0(x_i).
double hamiltonian(const Configuration& conf, const geometry::LatticeCloud& cloud,
                   const std::function<double(const Point&)>& weight = nullptr);

struct SandwichBounds {
    double lower = 0.0;  // N C_min - log(N!)/k
    double value = 0.0;  // -(1/k) log Per
    double upper = 0.0;  // N C_min
};

// Exact finite-N bounds tying the log-permanent to the optimal assignment.
SandwichBounds sandwich_bounds(const Configuration& conf, const geometry::LatticeCloud& cloud);

// Metropolis swap chain on permutations with stationary law
// pi(sigma) proportional to exp(sum_i a_{i,sigma(i)}). Returns the empirical
// first-row marginal frequencies; the consistent large-N route to M_1j where
// exact minors are out of reach.
std::vector<double> sample_first_marginal_row(const LogMatrix& a, int sweeps, int burn_in,
                                              Rng& rng);

}  // namespace permot::perm
