#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "permot/gibbs.hpp"

namespace permot::langevin {

struct SdeParams {
    gibbs::GibbsSpec spec;    // finite constant beta
    double dt = 1e-3;
    double horizon = 1.0;
    uint64_t seed = 1;
    std::optional<Configuration> initial;  // default: i.i.d. from the background
    // DoubledVariance uses sigma = 2/sqrt(beta), twice the variance of the
    // detailed-balance choice sqrt(2/beta) that makes e^{-beta H} stationary.
    enum class Noise { DetailedBalance, DoubledVariance };
    Noise noise = Noise::DetailedBalance;
    bool reflect = true;  // fold back into the support window
    int record_every = 10;

    double sigma() const {
        double beta = spec.beta;
        return noise == Noise::DoubledVariance ? 2.0 / std::sqrt(beta) : std::sqrt(2.0 / beta);
    }
};

// -grad_{x_i} H = (1/k) grad log Per row i - grad phi0(x_i); the weight
// gradient by central differences at h = 1e-5.
std::vector<Point> drift(const gibbs::GibbsSpec& spec, const Configuration& conf);

struct Trajectory {
    std::vector<double> times;
    std::vector<Configuration> states;
};

// Euler-Maruyama with per-coordinate noise sigma sqrt(dt); reflecting
// boundaries by coordinate folding. Throws when |drift| dt exceeds 1.
Trajectory integrate(const SdeParams& params);

struct StationarityReport {
    double tv = 0.0;
    grid::DiscreteMeasure histogram;
    std::vector<double> reference;
};

// Long-run one-point histogram, pooled over independent replicas (their RNG
// streams derive from the master seed), against the quadrature marginal of
// e^{-beta H} dx^{(x)N} / Z on the support window; N <= 3.
StationarityReport stationarity_check(const SdeParams& params, double burn_in_time, int bins,
                                      int replicas = 24);

}  // namespace permot::langevin
