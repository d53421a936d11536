#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "permot/expr.hpp"
#include "permot/geometry.hpp"
#include "permot/grid.hpp"
#include "permot/logperm.hpp"
#include "permot/meanfield.hpp"
#include "permot/rng.hpp"

namespace permot::gibbs {

// Background weighted measure (mu0, phi0): support window, density, direct
// sampler (inverse-CDF in 1d, rejection in 2d) and weight evaluator.
class WeightedMeasure {
public:
    static WeightedMeasure interval(double lo, double hi, std::function<double(double)> rho0,
                                    std::function<double(double)> phi0,
                                    double phi0_lipschitz = 0.0);
    static WeightedMeasure uniform_interval(double lo, double hi,
                                            std::function<double(double)> phi0 = nullptr,
                                            double phi0_lipschitz = 0.0);
    static WeightedMeasure box2d(double lo1, double hi1, double lo2, double hi2,
                                 std::function<double(const Point&)> rho0,
                                 std::function<double(const Point&)> phi0,
                                 double phi0_lipschitz = 0.0);

    int dim() const { return dim_; }
    double density(const Point& x) const;
    double weight(const Point& x) const;
    double lipschitz() const { return lipschitz_; }
    bool in_support(const Point& x) const;
    Point sample(Rng& rng) const;
    double support_lo(int axis = 0) const { return lo_[size_t(axis)]; }
    double support_hi(int axis = 0) const { return hi_[size_t(axis)]; }

    // Sampler self-test: empirical moments against quadrature within 3 se.
    bool self_test(Rng& rng, int draws = 20000) const;

private:
    int dim_ = 1;
    std::array<double, 2> lo_{0.0, 0.0}, hi_{1.0, 1.0};
    std::function<double(const Point&)> rho_;
    std::function<double(const Point&)> phi0_;
    double lipschitz_ = 0.0;
    double rho_max_ = 1.0;  // rejection envelope (2d)
    std::vector<double> cdf_grid_;  // inverse-CDF table (1d)
    int cdf_nodes_ = 4097;
    void build_cdf();
};

enum class BetaRule { Constant, EqualToK };

// Full specification of one beta-deformed ensemble.
struct GibbsSpec {
    geometry::ConvexBody body;
    int k = 1;
    geometry::LatticeCloud cloud;  // derived from (body, k)
    BetaRule rule = BetaRule::EqualToK;
    double beta = 1.0;             // used when rule == Constant
    WeightedMeasure background;
    // optional general cost (quenched route)
    perm::CostFunctional cost;     // c(x, p); empty = -x.p permanental kernel
    double beta_star = 0.0;        // scale for Per_c; defaults to k

    static GibbsSpec make(geometry::ConvexBody body, int k, BetaRule rule, double beta,
                          WeightedMeasure background);

    double beta_n() const { return rule == BetaRule::EqualToK ? double(k) : beta; }
};

// (beta_N/k) log Per(kernel) - beta_N sum phi0(x_i) + sum log rho0(x_i);
// -inf outside the support.
double log_density_unnormalized(const GibbsSpec& spec, const Configuration& conf);

// Discrete m-state background for the exact oracles and the MCMC TV check.
struct DiscreteStates {
    std::vector<Point> points;
    std::vector<double> weights;  // mu0-probabilities
    std::vector<double> phi0;
    int size() const { return static_cast<int>(points.size()); }
};

struct ExactDistribution {
    std::vector<double> prob;  // over m^N tuples, row-major in state ids
    double log_z = 0.0;
    int m = 0, n = 0;

    // marginal law of one coordinate (symmetric)
    std::vector<double> one_point() const;
};

ExactDistribution exact_distribution(const GibbsSpec& spec, const DiscreteStates& states,
                                     int n_particles);

struct McmcOptions {
    long steps = 100000;
    long burn_in = 10000;
    int thin = 10;
    uint64_t seed = 1;
    double initial_scale = 0.5;  // tuned during burn-in to acceptance 0.2-0.5
    long cache_audit_every = 10000;
};

struct McmcResult {
    std::vector<Configuration> samples;
    double acceptance_rate = 0.0;
    double final_scale = 0.0;
};

// Single-particle random-walk Metropolis on the continuous background.
McmcResult mcmc_sample(const GibbsSpec& spec, const McmcOptions& options);

// Same chain on a discrete state set (uniform state proposals); used by the
// TV-vs-enumeration acceptance check.
struct DiscreteMcmcResult {
    std::vector<std::vector<int>> samples;
    double acceptance_rate = 0.0;
};
DiscreteMcmcResult mcmc_sample_discrete(const GibbsSpec& spec, const DiscreteStates& states,
                                        int n_particles, long steps, long burn_in, int thin,
                                        uint64_t seed);

double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

struct Estimate {
    double value = 0.0;
    double stderr_jackknife = 0.0;
    bool low_ess = false;  // effective sample size < M/10
};

// Finite-beta potential estimator: companions drawn from the
// normalized e^{-beta phi0} mu0, the normalizing mass reinstated analytically,
// and log Z_N estimated by the same Monte Carlo with a random first point.
std::vector<Estimate> estimate_phi_beta(const GibbsSpec& spec, const std::vector<Point>& queries,
                                        int sample_count, uint64_t seed);

// Zero-temperature estimators: potential (normalized to rho0-average zero)
// and transport map T(x) = (1/k) sum_j p_j E[M_1j]. exact_max_n bounds the
// exact minor route; larger ensembles use the permutation-swap sampler.
struct PhiZeroOptions {
    int sample_count = 500;
    uint64_t seed = 1;
    int exact_max_n = 21;
    int sampler_sweeps = 600;
    int sampler_burn_in = 150;
    int normalization_quad = 129;  // rho0-average grid for c_N
};

std::vector<Estimate> estimate_phi_zero(const GibbsSpec& spec, const std::vector<Point>& queries,
                                        const PhiZeroOptions& options);
std::vector<Estimate> estimate_transport_map(const GibbsSpec& spec,
                                             const std::vector<Point>& queries,
                                             const PhiZeroOptions& options);

// Quenched variant: the target points are i.i.d. draws from nu (frozen per
// outer replica); map estimates are marginal barycentres sum_j p_j E[M_1j],
// which recovers grad(phi) for the quadratic cost.
struct QuenchedOptions {
    int outer_reps = 40;       // draws of the quenched target tuple
    int inner_samples = 40;    // companion draws per target tuple
    uint64_t seed = 1;
    int exact_max_n = 21;
    int sampler_sweeps = 600;
    int sampler_burn_in = 150;
};

struct QuenchedResult {
    std::vector<Estimate> potential;
    std::vector<Estimate> map;
};

QuenchedResult quenched_estimate(const GibbsSpec& spec,
                                 const std::function<Point(Rng&)>& target_sampler,
                                 const perm::CostFunctional& cost, double beta_star,
                                 const std::vector<Point>& queries,
                                 const QuenchedOptions& options);

Configuration empirical_support(const std::vector<Configuration>& samples);
grid::DiscreteMeasure one_point_histogram(const std::vector<Configuration>& samples,
                                          double lo, double hi, int bins);

// Exact Gibbs sampler for the pure permanental regime beta_N = k via the
// permutation augmentation Per = sum_sigma prod_i e^{x_i . p_sigma(i)}:
// alternate sigma-swaps with exact coordinatewise draws of x_i given sigma.
std::vector<Configuration> augmented_permanental_chain(const GibbsSpec& spec, int sweeps,
                                                       int burn_in, int thin, uint64_t seed);

}  // namespace permot::gibbs
