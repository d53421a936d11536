#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "permot/assignment.hpp"
#include "permot/convexcalc.hpp"
#include "permot/geometry.hpp"
#include "permot/logperm.hpp"
#include "permot/rng.hpp"

namespace permot::meanfield {

// m support points of a compact X with mu0-weights and phi0 values; the
// carrier for every exact finite-N computation.
struct DiscreteSpace {
    std::vector<Point> points;
    std::vector<double> mu0;   // > 0, sums to 1
    std::vector<double> phi0;  // weight values per point

    int size() const { return static_cast<int>(points.size()); }
    void validate() const;
};

// Hamiltonian evaluator on tuples of space points. The permanental one is
// built from a lattice cloud; tests also use H == 0 and hand-made tables.
using HamiltonianFn = std::function<double(const std::vector<int>& state_ids,
                                           const DiscreteSpace& space)>;

HamiltonianFn permanental_hamiltonian(const geometry::LatticeCloud& cloud);
HamiltonianFn zero_hamiltonian();

double relative_entropy(const std::vector<double>& mu, const std::vector<double>& mu0);

// pi_N(u)(x) = (1/beta_N) log[ (1/Z_N[u]) * sum_y exp(-beta_N(H(x,y) + sum u(y_j))) mu(y) ]
// with Z_N[u] the fully tilted sum; exact tensor mode, m^(N-1) <= 1e6.
std::vector<double> pi_n(const DiscreteSpace& space, const HamiltonianFn& h, int n_particles,
                         double beta_n, const std::vector<double>& u,
                         const std::vector<double>& mu);

struct MeanFieldState {
    std::vector<double> u;
    int iterations = 0;
    double residual = kInf;
    bool converged = false;
    std::vector<double> residual_history;
};

// Anchored balanced iteration u <- pi_N(u), u(x0) = 0, x0 the first support
// point; the fixed point's tilted one-point correlation equals mu.
MeanFieldState balanced_fixed_point(const DiscreteSpace& space, const HamiltonianFn& h,
                                    int n_particles, double beta_n,
                                    const std::vector<double>& mu, double tol = 1e-10,
                                    int max_iter = 500);

// One-point correlation of the u-tilted Gibbs measure over mu^{(x)N}.
std::vector<double> tilted_one_point(const DiscreteSpace& space, const HamiltonianFn& h,
                                     int n_particles, double beta_n,
                                     const std::vector<double>& u, const std::vector<double>& mu);

// Contraction variant with prefactor (1 - beta/beta_N) and base measure
// mu_u = e^{beta u} mu0; a strict contraction with that exact factor.
std::vector<double> pi_n_beta(const DiscreteSpace& space, const HamiltonianFn& h, int n_particles,
                              double beta_n, double beta, const std::vector<double>& u);

MeanFieldState mean_field_fixed_point(const DiscreteSpace& space, const HamiltonianFn& h,
                                      int n_particles, double beta_n, double beta,
                                      double tol = 1e-12, int max_iter = 2000);

struct GibbsVariationalReport {
    double gibbs_free_energy = 0.0;     // F^{(N)} at the Gibbs measure
    double log_z = 0.0;                 // log Z_N
    double identity_residual = 0.0;     // |beta F(Gibbs) + log Z_N / N|
    std::vector<double> competitor_gap;  // F(mu_N) - F(Gibbs) per competitor
};

// Exact Gibbs variational principle: beta F^{(N)}(Gibbs) = -(1/N) log Z_N and
// every competitor has larger free energy.
GibbsVariationalReport gibbs_variational_check(
    const DiscreteSpace& space, const HamiltonianFn& h, int n_particles, double beta,
    const std::vector<std::vector<double>>& competitors);

struct FreeEnergyReport {
    double energy = 0.0;      // E via the cloud surrogate (O(1/k) bias)
    double entropy = 0.0;     // D_{mu0}(mu) >= 0
    double beta = 0.0;
    double total = 0.0;       // E + D / beta (beta = inf drops the entropy term)
    bool cloud_surrogate = true;
};

FreeEnergyReport free_energy(const std::vector<double>& mu, const DiscreteSpace& space,
                             const geometry::LatticeCloud& cloud, double beta);

// 1d Monge-Ampere second boundary value solver on a window.
struct Ma1dProblem {
    double beta = 0.0;                          // in [0, inf); 0 = pure transport
    std::function<double(double)> rho0;         // density of mu0 (probability)
    std::function<double(double)> phi0;         // weight
    double support_lo = 0.0, support_hi = 1.0;  // support of mu0
    geometry::ConvexBody body;                  // P = [a, b]
    grid::Axis window{-1.0, 1.0, 801};
    double tol = 1e-8;
    int max_iter = 200;
};

struct Ma1dSolution {
    grid::ConvexGridFunction phi;
    double residual = kInf;
    int newton_iterations = 0;
    std::vector<double> damping_history;
};

Ma1dSolution solve_ma_1d(const Ma1dProblem& problem,
                         const std::vector<double>* initial_guess = nullptr);

struct BetaLadderRow {
    double beta = 0.0;
    double sup_gap = 0.0;  // ||phi_beta - Pi_X phi0||_inf on the sub-window
};

// Sup-norm gaps to the envelope along a beta ladder, warm-started.
std::vector<BetaLadderRow> beta_limit_check(const Ma1dProblem& base,
                                            const std::vector<double>& betas,
                                            double subwindow_lo, double subwindow_hi);

struct MeanEnergyReport {
    double mc_mean = 0.0;        // Monte-Carlo mean of H^{(N)}/N over mu^{(x)N}
    double mc_stderr = 0.0;
    double surrogate = 0.0;      // mean per-draw optimal assignment cost
    double gap = 0.0;            // |mc_mean - surrogate|
    bool lower_bound_ok = true;  // mc_mean >= surrogate - log N!/(Nk) - 3 se
};

MeanEnergyReport mean_energy_check(const std::function<double(Rng&)>& mu_sampler,
                                   const geometry::LatticeCloud& cloud,
                                   const std::function<double(const Point&)>& weight, int trials,
                                   Rng& rng);

// Exact factorized (1/kN) log Z_{N,k} for the permanental ensemble at
// beta_N = k: (1/N) sum_p (1/k) log int e^{k(p.x - phi0)} mu0 + log N!/(Nk).
double factorized_log_z_rate(const geometry::LatticeCloud& cloud,
                             const std::function<double(double)>& rho0,
                             const std::function<double(double)>& phi0, double support_lo,
                             double support_hi, int quad_nodes = 4001);

}  // namespace permot::meanfield
