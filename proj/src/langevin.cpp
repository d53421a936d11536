#include "permot/langevin.hpp"

#include <algorithm>
#include <cmath>

namespace permot::langevin {

std::vector<Point> drift(const gibbs::GibbsSpec& spec, const Configuration& conf) {
    auto grads = perm::grad_log_permanent(conf, spec.cloud);
    const double h = 1e-5;
    for (size_t i = 0; i < grads.size(); ++i) {
        grads[i] = (1.0 / spec.k) * grads[i];
        for (int d = 0; d < conf.dim; ++d) {
            Point up = conf.x[i], dn = conf.x[i];
            up[d] += h;
            dn[d] -= h;
            grads[i][d] -= (spec.background.weight(up) - spec.background.weight(dn)) / (2.0 * h);
        }
    }
    return grads;
}

namespace {

double fold(double x, double lo, double hi) {
    double span = hi - lo;
    if (span <= 0.0) return x;
    double t = std::fmod(x - lo, 2.0 * span);
    if (t < 0.0) t += 2.0 * span;
    return t <= span ? lo + t : hi - (t - span);
}

}  // namespace

Trajectory integrate(const SdeParams& params) {
    const auto& spec = params.spec;
    if (spec.rule != gibbs::BetaRule::Constant)
        throw invalid_input("langevin: needs a finite constant beta");
    const int n = spec.cloud.size();
    const int dim = spec.background.dim();
    Rng rng(params.seed, 53);

    Configuration state;
    if (params.initial) {
        state = *params.initial;
        if (state.size() != n) throw invalid_input("langevin: initial configuration size");
    } else {
        state.dim = dim;
        for (int i = 0; i < n; ++i) state.x.push_back(spec.background.sample(rng));
    }

    const double sigma = params.sigma();
    const double noise_scale = sigma * std::sqrt(params.dt);
    const long steps = long(std::ceil(params.horizon / params.dt));

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(state);
    for (long step = 1; step <= steps; ++step) {
        auto d = drift(spec, state);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < dim; ++c) {
                double move = d[size_t(i)][c] * params.dt;
                if (std::fabs(d[size_t(i)][c]) * params.dt > 1.0)
                    throw invalid_input("langevin: drift magnitude exceeds 1/dt; reduce dt");
                double x = state.x[size_t(i)][c] + move + noise_scale * rng.normal();
                if (params.reflect)
                    x = fold(x, spec.background.support_lo(c), spec.background.support_hi(c));
                state.x[size_t(i)][c] = x;
            }
        if (step % params.record_every == 0) {
            traj.times.push_back(step * params.dt);
            traj.states.push_back(state);
        }
    }
    return traj;
}

StationarityReport stationarity_check(const SdeParams& params, double burn_in_time, int bins,
                                      int replicas) {
    const auto& spec = params.spec;
    const int n = spec.cloud.size();
    if (n > 3) throw invalid_input("stationarity_check: reference quadrature needs N <= 3");
    if (spec.background.dim() != 1)
        throw invalid_input("stationarity_check: 1d support windows only");
    const double beta = spec.beta;
    const double lo = spec.background.support_lo(), hi = spec.background.support_hi();

    // reference one-point marginal of e^{-beta H} dx^N / Z by tensor quadrature
    const int q = n == 1 ? 2001 : (n == 2 ? 201 : 41);
    const double h = (hi - lo) / (q - 1);
    std::vector<double> marginal(static_cast<size_t>(q), 0.0);
    std::vector<int> idx(static_cast<size_t>(n), 0);
    // first pass: find the H-range for stable exponentials
    double h_min = kInf;
    Configuration conf;
    conf.dim = 1;
    conf.x.assign(static_cast<size_t>(n), Point(0.0));
    for (;;) {
        for (int i = 0; i < n; ++i) conf.x[size_t(i)] = Point(lo + idx[size_t(i)] * h);
        double hv = perm::hamiltonian(conf, spec.cloud, [&](const Point& p) {
            return spec.background.weight(p);
        });
        h_min = std::min(h_min, hv);
        int axis = n - 1;
        while (axis >= 0 && ++idx[size_t(axis)] == q) { idx[size_t(axis)] = 0; --axis; }
        if (axis < 0) break;
    }
    idx.assign(static_cast<size_t>(n), 0);
    double z = 0.0;
    for (;;) {
        double wq = 1.0;
        for (int i = 0; i < n; ++i)
            wq *= (idx[size_t(i)] == 0 || idx[size_t(i)] == q - 1) ? 0.5 : 1.0;
        for (int i = 0; i < n; ++i) conf.x[size_t(i)] = Point(lo + idx[size_t(i)] * h);
        double hv = perm::hamiltonian(conf, spec.cloud, [&](const Point& p) {
            return spec.background.weight(p);
        });
        double w = wq * std::exp(-beta * (hv - h_min));
        z += w;
        marginal[size_t(idx[0])] += w;
        int axis = n - 1;
        while (axis >= 0 && ++idx[size_t(axis)] == q) { idx[size_t(axis)] = 0; --axis; }
        if (axis < 0) break;
    }
    for (auto& m : marginal) m /= z;

    // pooled long-trajectory histogram over independent replicas
    std::vector<Configuration> kept;
    for (int rep = 0; rep < replicas; ++rep) {
        SdeParams run = params;
        run.seed = params.seed + 1000003ULL * uint64_t(rep);
        Trajectory traj = integrate(run);
        for (size_t t = 0; t < traj.states.size(); ++t)
            if (traj.times[t] >= burn_in_time) kept.push_back(traj.states[t]);
    }
    auto hist = gibbs::one_point_histogram(kept, lo, hi, bins);

    // bin the reference to the same histogram
    std::vector<double> ref_bins(static_cast<size_t>(bins), 0.0);
    for (int i = 0; i < q; ++i) {
        double x = lo + i * h;
        int b = std::clamp(int((x - lo) / (hi - lo) * bins), 0, bins - 1);
        ref_bins[size_t(b)] += marginal[size_t(i)];
    }
    StationarityReport report;
    report.tv = gibbs::tv_distance(hist.mass, ref_bins);
    report.histogram = hist;
    report.reference = ref_bins;
    return report;
}

}  // namespace permot::langevin
