#include "permot/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace permot::gibbs {

namespace {

double jackknife_stderr(const std::vector<double>& leave_one_out) {
    const size_t m = leave_one_out.size();
    if (m < 2) return 0.0;
    double mean = 0.0;
    for (double v : leave_one_out) mean += v;
    mean /= double(m);
    double s = 0.0;
    for (double v : leave_one_out) s += (v - mean) * (v - mean);
    return std::sqrt((double(m) - 1.0) / double(m) * s);
}

// log-mean-exp with one index removed
double log_mean_exclude(const std::vector<double>& terms, size_t skip) {
    double peak = kNegInf;
    for (size_t i = 0; i < terms.size(); ++i)
        if (i != skip) peak = std::max(peak, terms[i]);
    double s = 0.0;
    for (size_t i = 0; i < terms.size(); ++i)
        if (i != skip) s += std::exp(terms[i] - peak);
    return peak + std::log(s / double(terms.size() - 1));
}

double effective_sample_fraction(const std::vector<double>& terms) {
    double peak = kNegInf;
    for (double t : terms) peak = std::max(peak, t);
    double s1 = 0.0, s2 = 0.0;
    for (double t : terms) {
        double w = std::exp(t - peak);
        s1 += w;
        s2 += w * w;
    }
    return (s1 * s1 / s2) / double(terms.size());
}

}  // namespace

// --- WeightedMeasure -------------------------------------------------------

WeightedMeasure WeightedMeasure::interval(double lo, double hi,
                                          std::function<double(double)> rho0,
                                          std::function<double(double)> phi0,
                                          double phi0_lipschitz) {
    if (hi <= lo) throw invalid_input("WeightedMeasure: empty interval");
    WeightedMeasure w;
    w.dim_ = 1;
    w.lo_[0] = lo;
    w.hi_[0] = hi;
    w.rho_ = [rho0](const Point& x) { return rho0(x[0]); };
    if (phi0) w.phi0_ = [phi0](const Point& x) { return phi0(x[0]); };
    w.lipschitz_ = phi0_lipschitz;
    w.build_cdf();
    return w;
}

WeightedMeasure WeightedMeasure::uniform_interval(double lo, double hi,
                                                  std::function<double(double)> phi0,
                                                  double phi0_lipschitz) {
    double inv = 1.0 / (hi - lo);
    return interval(lo, hi, [inv](double) { return inv; }, std::move(phi0), phi0_lipschitz);
}

WeightedMeasure WeightedMeasure::box2d(double lo1, double hi1, double lo2, double hi2,
                                       std::function<double(const Point&)> rho0,
                                       std::function<double(const Point&)> phi0,
                                       double phi0_lipschitz) {
    WeightedMeasure w;
    w.dim_ = 2;
    w.lo_ = {lo1, lo2};
    w.hi_ = {hi1, hi2};
    w.rho_ = std::move(rho0);
    w.phi0_ = std::move(phi0);
    w.lipschitz_ = phi0_lipschitz;
    // rejection envelope by grid scan
    double peak = 0.0;
    for (int i = 0; i <= 64; ++i)
        for (int j = 0; j <= 64; ++j) {
            Point p(lo1 + (hi1 - lo1) * i / 64.0, lo2 + (hi2 - lo2) * j / 64.0);
            peak = std::max(peak, w.rho_(p));
        }
    w.rho_max_ = peak * 1.05;
    return w;
}

void WeightedMeasure::build_cdf() {
    cdf_grid_.assign(static_cast<size_t>(cdf_nodes_), 0.0);
    double h = (hi_[0] - lo_[0]) / (cdf_nodes_ - 1);
    for (int i = 1; i < cdf_nodes_; ++i) {
        double x0 = lo_[0] + (i - 1) * h, x1 = lo_[0] + i * h;
        cdf_grid_[size_t(i)] = cdf_grid_[size_t(i) - 1] +
                               0.5 * h * (rho_(Point(x0)) + rho_(Point(x1)));
    }
    double total = cdf_grid_.back();
    if (total <= 0.0) throw invalid_input("WeightedMeasure: density integrates to zero");
    for (auto& c : cdf_grid_) c /= total;
}

double WeightedMeasure::density(const Point& x) const { return in_support(x) ? rho_(x) : 0.0; }

double WeightedMeasure::weight(const Point& x) const { return phi0_ ? phi0_(x) : 0.0; }

bool WeightedMeasure::in_support(const Point& x) const {
    for (int i = 0; i < dim_; ++i)
        if (x[i] < lo_[size_t(i)] - 1e-12 || x[i] > hi_[size_t(i)] + 1e-12) return false;
    return true;
}

Point WeightedMeasure::sample(Rng& rng) const {
    if (dim_ == 1) {
        double u = rng.uniform();
        auto it = std::lower_bound(cdf_grid_.begin(), cdf_grid_.end(), u);
        size_t i = std::min(size_t(it - cdf_grid_.begin()), cdf_grid_.size() - 1);
        if (i == 0) i = 1;
        double h = (hi_[0] - lo_[0]) / (cdf_nodes_ - 1);
        double c0 = cdf_grid_[i - 1], c1 = cdf_grid_[i];
        double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
        return Point(lo_[0] + (double(i - 1) + frac) * h);
    }
    for (int attempt = 0; attempt < 100000; ++attempt) {
        Point p(rng.uniform(lo_[0], hi_[0]), rng.uniform(lo_[1], hi_[1]));
        if (rng.uniform() * rho_max_ <= rho_(p)) return p;
    }
    throw invalid_input("WeightedMeasure: rejection sampler starved");
}

bool WeightedMeasure::self_test(Rng& rng, int draws) const {
    // compare the empirical first/second moments of coordinate 0 against
    // quadrature within three standard errors
    double h = (hi_[0] - lo_[0]) / 2048.0;
    double mass = 0.0, m1 = 0.0, m2 = 0.0;
    for (int i = 0; i <= 2048; ++i) {
        double x = lo_[0] + i * h;
        double w = (i == 0 || i == 2048) ? 0.5 : 1.0;
        double slice = 0.0;
        if (dim_ == 1) {
            slice = rho_(Point(x));
        } else {
            for (int j = 0; j <= 256; ++j) {
                double y = lo_[1] + (hi_[1] - lo_[1]) * j / 256.0;
                slice += rho_(Point(x, y)) * ((j == 0 || j == 256) ? 0.5 : 1.0);
            }
            slice *= (hi_[1] - lo_[1]) / 256.0;
        }
        mass += w * h * slice;
        m1 += w * h * slice * x;
        m2 += w * h * slice * x * x;
    }
    m1 /= mass;
    m2 /= mass;
    double mean = 0.0, sq = 0.0, quart = 0.0;
    for (int t = 0; t < draws; ++t) {
        double x = sample(rng)[0];
        mean += x;
        sq += x * x;
        quart += x * x * x * x;
    }
    mean /= draws;
    sq /= draws;
    quart /= draws;
    double se_mean = std::sqrt(std::max(m2 - m1 * m1, 1e-12) / draws);
    double se_sq = std::sqrt(std::max(quart - sq * sq, 1e-12) / draws);
    return std::fabs(mean - m1) <= 3.0 * se_mean && std::fabs(sq - m2) <= 3.0 * se_sq;
}

// --- GibbsSpec --------------------------------------------------------------

GibbsSpec GibbsSpec::make(geometry::ConvexBody body, int k, BetaRule rule, double beta,
                          WeightedMeasure background) {
    GibbsSpec spec{std::move(body), k, {}, rule, beta, std::move(background), nullptr, 0.0};
    spec.cloud = geometry::lattice_points(spec.body, k);
    if (rule == BetaRule::Constant && beta <= 0.0)
        throw invalid_input("GibbsSpec: constant beta must be positive");
    return spec;
}

double log_density_unnormalized(const GibbsSpec& spec, const Configuration& conf) {
    for (const Point& x : conf.x)
        if (!spec.background.in_support(x)) return kNegInf;
    double beta_n = spec.beta_n();
    double lp = perm::log_permanent(perm::kernel(conf, spec.cloud));
    double out = beta_n / spec.k * lp;
    for (const Point& x : conf.x) {
        out -= beta_n * spec.background.weight(x);
        double rho = spec.background.density(x);
        if (rho <= 0.0) return kNegInf;
        out += std::log(rho);
    }
    return out;
}

// --- exact enumeration oracle ----------------------------------------------

namespace {

double discrete_log_weight(const GibbsSpec& spec, const DiscreteStates& states,
                           const std::vector<int>& ids) {
    Configuration conf;
    conf.dim = states.points[0].dim;
    for (int id : ids) conf.x.push_back(states.points[size_t(id)]);
    double beta_n = spec.beta_n();
    double t = beta_n / spec.k * perm::log_permanent(perm::kernel(conf, spec.cloud));
    for (int id : ids)
        t += -beta_n * states.phi0[size_t(id)] + std::log(states.weights[size_t(id)]);
    return t;
}

template <typename Visit>
void for_each_tuple(int m, int n, Visit&& visit) {
    std::vector<int> state(static_cast<size_t>(n), 0);
    for (;;) {
        visit(const_cast<const std::vector<int>&>(state));
        int axis = n - 1;
        while (axis >= 0 && ++state[size_t(axis)] == m) { state[size_t(axis)] = 0; --axis; }
        if (axis < 0) break;
    }
}

}  // namespace

ExactDistribution exact_distribution(const GibbsSpec& spec, const DiscreteStates& states,
                                     int n_particles) {
    const int m = states.size();
    double tuples = std::pow(double(m), double(n_particles));
    if (tuples > 1e6) throw invalid_input("exact_distribution capped at m^N <= 1e6");
    if (n_particles != spec.cloud.size())
        throw invalid_input("exact_distribution: N must match the cloud size");
    ExactDistribution dist;
    dist.m = m;
    dist.n = n_particles;
    dist.prob.resize(static_cast<size_t>(tuples));
    std::vector<double> logs(static_cast<size_t>(tuples));
    size_t idx = 0;
    double log_z = kNegInf;
    for_each_tuple(m, n_particles, [&](const std::vector<int>& ids) {
        double t = discrete_log_weight(spec, states, ids);
        logs[idx] = t;
        log_z = log_add(log_z, t);
        ++idx;
    });
    for (size_t t = 0; t < logs.size(); ++t) dist.prob[t] = std::exp(logs[t] - log_z);
    dist.log_z = log_z;
    return dist;
}

std::vector<double> ExactDistribution::one_point() const {
    std::vector<double> marg(static_cast<size_t>(m), 0.0);
    size_t stride = prob.size() / size_t(m);  // first coordinate is the outer index
    for (size_t t = 0; t < prob.size(); ++t) marg[t / stride] += prob[t];
    return marg;
}

// --- MCMC -------------------------------------------------------------------

McmcResult mcmc_sample(const GibbsSpec& spec, const McmcOptions& options) {
    Rng rng(options.seed);
    const int n = spec.cloud.size();
    Configuration state;
    state.dim = spec.background.dim();
    for (int i = 0; i < n; ++i) state.x.push_back(spec.background.sample(rng));
    double log_dens = log_density_unnormalized(spec, state);

    McmcResult result;
    double scale = options.initial_scale;
    long accepted = 0, window_accepted = 0, window_steps = 0, counted = 0;
    for (long step = 0; step < options.steps; ++step) {
        int i = rng.uniform_int(n);
        Configuration proposal = state;
        for (int d = 0; d < state.dim; ++d) proposal.x[size_t(i)][d] += scale * rng.normal();
        double prop_dens = log_density_unnormalized(spec, proposal);
        bool accept = prop_dens > kNegInf &&
                      (prop_dens >= log_dens || std::log(rng.uniform()) < prop_dens - log_dens);
        if (accept) {
            state = std::move(proposal);
            log_dens = prop_dens;
            ++accepted;
            ++window_accepted;
        }
        ++window_steps;
        if (step < options.burn_in && window_steps == 500) {
            double rate = double(window_accepted) / window_steps;
            if (rate < 0.2) scale *= 0.8;
            else if (rate > 0.5) scale *= 1.25;
            window_accepted = window_steps = 0;
        }
        if (step >= options.burn_in) {
            ++counted;
            if (counted % options.thin == 0) result.samples.push_back(state);
        }
        if (options.cache_audit_every > 0 && (step + 1) % options.cache_audit_every == 0) {
            double fresh = log_density_unnormalized(spec, state);
            if (std::fabs(fresh - log_dens) > 1e-9 * std::max(1.0, std::fabs(fresh)))
                throw std::logic_error("mcmc_sample: cached log-density diverged");
            log_dens = fresh;
        }
    }
    result.acceptance_rate = double(accepted) / double(options.steps);
    result.final_scale = scale;
    return result;
}

DiscreteMcmcResult mcmc_sample_discrete(const GibbsSpec& spec, const DiscreteStates& states,
                                        int n_particles, long steps, long burn_in, int thin,
                                        uint64_t seed) {
    Rng rng(seed);
    const int m = states.size();
    std::vector<int> state(static_cast<size_t>(n_particles));
    for (auto& id : state) id = rng.uniform_int(m);
    double log_w = discrete_log_weight(spec, states, state);

    DiscreteMcmcResult result;
    long accepted = 0, counted = 0;
    for (long step = 0; step < steps; ++step) {
        int i = rng.uniform_int(n_particles);
        int proposal_state = rng.uniform_int(m);
        std::vector<int> proposal = state;
        proposal[size_t(i)] = proposal_state;
        double w = discrete_log_weight(spec, states, proposal);
        if (w >= log_w || std::log(rng.uniform()) < w - log_w) {
            state = std::move(proposal);
            log_w = w;
            ++accepted;
        }
        if (step >= burn_in) {
            ++counted;
            if (counted % thin == 0) result.samples.push_back(state);
        }
    }
    result.acceptance_rate = double(accepted) / double(steps);
    return result;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw invalid_input("tv_distance: size mismatch");
    double tv = 0.0;
    for (size_t i = 0; i < p.size(); ++i) tv += std::fabs(p[i] - q[i]);
    return 0.5 * tv;
}

// --- finite-beta potential estimator ------------------------------------------

std::vector<Estimate> estimate_phi_beta(const GibbsSpec& spec, const std::vector<Point>& queries,
                                        int sample_count, uint64_t seed) {
    if (spec.rule != BetaRule::Constant)
        throw invalid_input("estimate_phi_beta: needs a finite constant beta");
    const double beta = spec.beta;
    const int n = spec.cloud.size();
    const int k = spec.k;
    Rng rng(seed, 17);

    // companion measure e^{-beta phi0} mu0 / W, mass W reinstated analytically
    const auto& bg = spec.background;
    if (bg.dim() != 1)
        throw invalid_input("estimate_phi_beta: 1d background only at desk scale");
    double lo = bg.support_lo(), hi = bg.support_hi();
    double min_w = kInf;
    for (int i = 0; i <= 2048; ++i)
        min_w = std::min(min_w, bg.weight(Point(lo + (hi - lo) * i / 2048.0)));
    double log_w_mass;  // log W = log int e^{-beta phi0} dmu0
    {
        double h = (hi - lo) / 4096.0;
        double acc = 0.0;
        for (int i = 0; i <= 4096; ++i) {
            double x = lo + i * h;
            double ww = (i == 0 || i == 4096) ? 0.5 : 1.0;
            acc += ww * h * bg.density(Point(x)) * std::exp(-beta * (bg.weight(Point(x)) - min_w));
        }
        log_w_mass = std::log(acc) - beta * min_w;
    }
    auto draw_tilted = [&](Rng& r) {
        for (int attempt = 0; attempt < 200000; ++attempt) {
            Point x = bg.sample(r);
            if (std::log(r.uniform()) < -beta * (bg.weight(x) - min_w)) return x;
        }
        throw invalid_input("estimate_phi_beta: tilted rejection starved");
    };

    const size_t q_count = queries.size();
    std::vector<std::vector<double>> t_query(q_count,
                                             std::vector<double>(size_t(sample_count)));
    std::vector<double> t_z(static_cast<size_t>(sample_count));
    std::vector<double> row(static_cast<size_t>(n));
    for (int mdraw = 0; mdraw < sample_count; ++mdraw) {
        Configuration conf;
        conf.dim = 1;
        conf.x.push_back(Point(0.0));  // placeholder first row
        for (int i = 1; i < n; ++i) conf.x.push_back(draw_tilted(rng));
        auto a = perm::kernel(conf, spec.cloud);
        auto minors = perm::row_minors(a, 0, 1e-6);
        auto eval = [&](const Point& x) {
            for (int j = 0; j < n; ++j) row[size_t(j)] = dot(x, spec.cloud.points[size_t(j)]);
            return perm::expand_row(row, minors).log_per;
        };
        for (size_t q = 0; q < q_count; ++q)
            t_query[q][size_t(mdraw)] = beta / k * eval(queries[q]);
        t_z[size_t(mdraw)] = beta / k * eval(draw_tilted(rng));
    }

    double lme_z = log_mean(t_z);
    std::vector<Estimate> out(q_count);
    for (size_t q = 0; q < q_count; ++q) {
        double lme_x = log_mean(t_query[q]);
        out[q].value = (lme_x - lme_z - log_w_mass) / beta;
        std::vector<double> loo(static_cast<size_t>(sample_count));
        for (size_t mdraw = 0; mdraw < size_t(sample_count); ++mdraw)
            loo[mdraw] = (log_mean_exclude(t_query[q], mdraw) - log_mean_exclude(t_z, mdraw)) / beta;
        out[q].stderr_jackknife = jackknife_stderr(loo);
        out[q].low_ess = effective_sample_fraction(t_query[q]) < 0.1;
    }
    return out;
}

// --- zero-temperature estimators -----------------------------------------------

namespace {

struct RowStats {
    std::vector<std::vector<double>> log_per;   // [query][draw]
    std::vector<std::vector<Point>> barycenter; // [query][draw] sum_j p_j M_1j (cloud coords)
};

// Per companion draw, evaluate log Per and the first-row marginal barycentre at
// every query point, via exact minors below the cap and the permutation-swap
// sampler above it.
RowStats collect_row_stats(const GibbsSpec& spec, const geometry::LatticeCloud& targets,
                           const perm::CostFunctional& cost, double beta_star,
                           const std::vector<Point>& queries, int draws, int exact_max_n,
                           int sweeps, int burn_in, Rng& rng, bool need_log_per) {
    const int n = targets.size();
    const auto& bg = spec.background;
    RowStats stats;
    stats.log_per.assign(queries.size(), {});
    stats.barycenter.assign(queries.size(), {});
    const bool exact = n <= exact_max_n;
    if (!exact && need_log_per)
        throw invalid_input("potential estimator needs N <= " + std::to_string(exact_max_n) +
                            " (exact minor route); the map estimator scales further");
    std::vector<double> row(static_cast<size_t>(n));
    for (int d = 0; d < draws; ++d) {
        Configuration conf;
        conf.dim = bg.dim();
        conf.x.push_back(Point::zero(bg.dim()));
        for (int i = 1; i < n; ++i) conf.x.push_back(bg.sample(rng));
        auto fill_row = [&](const Point& x) {
            for (int j = 0; j < n; ++j)
                row[size_t(j)] = cost ? -beta_star * cost(x, targets.scaled(j))
                                      : dot(x, targets.points[size_t(j)]);
        };
        if (exact) {
            auto a = perm::kernel(conf, targets, cost, beta_star);
            auto minors = perm::row_minors(a, 0, 1e-6);
            for (size_t q = 0; q < queries.size(); ++q) {
                fill_row(queries[q]);
                auto exp = perm::expand_row(row, minors);
                stats.log_per[q].push_back(exp.log_per);
                Point bary = Point::zero(targets.dim);
                for (int j = 0; j < n; ++j)
                    bary = bary + exp.marginal_row[size_t(j)] * targets.points[size_t(j)];
                stats.barycenter[q].push_back(bary);
            }
        } else {
            auto a = perm::kernel(conf, targets, cost, beta_star);
            for (size_t q = 0; q < queries.size(); ++q) {
                fill_row(queries[q]);
                for (int j = 0; j < n; ++j) a.a[size_t(j)] = row[size_t(j)];
                a.refresh_row_max();
                auto freq = perm::sample_first_marginal_row(a, sweeps, burn_in, rng);
                Point bary = Point::zero(targets.dim);
                for (int j = 0; j < n; ++j)
                    bary = bary + freq[size_t(j)] * targets.points[size_t(j)];
                stats.barycenter[q].push_back(bary);
            }
        }
    }
    return stats;
}

std::vector<double> normalization_nodes(const WeightedMeasure& bg, int count) {
    std::vector<double> xs(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i)
        xs[size_t(i)] = bg.support_lo() + (bg.support_hi() - bg.support_lo()) * i / (count - 1.0);
    return xs;
}

}  // namespace

std::vector<Estimate> estimate_phi_zero(const GibbsSpec& spec, const std::vector<Point>& queries,
                                        const PhiZeroOptions& options) {
    const auto& bg = spec.background;
    if (bg.dim() != 1) throw invalid_input("estimate_phi_zero: 1d background only");
    Rng rng(options.seed, 23);
    // normalization grid appended to the queries so c_N shares the minors
    std::vector<Point> all = queries;
    auto xs = normalization_nodes(bg, options.normalization_quad);
    for (double x : xs) all.emplace_back(x);
    auto stats = collect_row_stats(spec, spec.cloud, nullptr, 1.0, all, options.sample_count,
                                   options.exact_max_n, options.sampler_sweeps,
                                   options.sampler_burn_in, rng, true);
    const int m = options.sample_count;
    const int k = spec.k;
    // c_N: rho0-average of the raw potential (trapezoid on the support)
    auto raw_at = [&](size_t q, int skip) {
        double acc = 0.0;
        int used = 0;
        for (int d = 0; d < m; ++d) {
            if (d == skip) continue;
            acc += stats.log_per[q][size_t(d)];
            ++used;
        }
        return acc / (double(used) * k);
    };
    auto c_n = [&](int skip) {
        double h = (bg.support_hi() - bg.support_lo()) / (options.normalization_quad - 1.0);
        double acc = 0.0, mass = 0.0;
        for (int i = 0; i < options.normalization_quad; ++i) {
            double w = (i == 0 || i == options.normalization_quad - 1) ? 0.5 : 1.0;
            double rho = bg.density(Point(xs[size_t(i)]));
            acc += w * h * rho * raw_at(queries.size() + size_t(i), skip);
            mass += w * h * rho;
        }
        return acc / mass;
    };
    double base_c = c_n(-1);
    std::vector<Estimate> out(queries.size());
    for (size_t q = 0; q < queries.size(); ++q) {
        out[q].value = raw_at(q, -1) - base_c;
        std::vector<double> loo(static_cast<size_t>(m));
        for (int d = 0; d < m; ++d) loo[size_t(d)] = raw_at(q, d) - c_n(d);
        out[q].stderr_jackknife = jackknife_stderr(loo);
    }
    return out;
}

std::vector<Estimate> estimate_transport_map(const GibbsSpec& spec,
                                             const std::vector<Point>& queries,
                                             const PhiZeroOptions& options) {
    const auto& bg = spec.background;
    Rng rng(options.seed, 29);
    auto stats = collect_row_stats(spec, spec.cloud, nullptr, 1.0, queries, options.sample_count,
                                   options.exact_max_n, options.sampler_sweeps,
                                   options.sampler_burn_in, rng, false);
    (void)bg;
    const int m = options.sample_count;
    const int k = spec.k;
    std::vector<Estimate> out(queries.size());
    for (size_t q = 0; q < queries.size(); ++q) {
        double mean = 0.0;
        for (int d = 0; d < m; ++d) mean += stats.barycenter[q][size_t(d)][0];
        mean /= double(m) * k;
        out[q].value = mean;
        std::vector<double> loo(static_cast<size_t>(m));
        for (int d = 0; d < m; ++d) {
            double acc = 0.0;
            for (int e = 0; e < m; ++e)
                if (e != d) acc += stats.barycenter[q][size_t(e)][0];
            loo[size_t(d)] = acc / (double(m - 1) * k);
        }
        out[q].stderr_jackknife = jackknife_stderr(loo);
    }
    return out;
}

// --- quenched variant --------------------------------------------------------

QuenchedResult quenched_estimate(const GibbsSpec& spec,
                                 const std::function<Point(Rng&)>& target_sampler,
                                 const perm::CostFunctional& cost, double beta_star,
                                 const std::vector<Point>& queries,
                                 const QuenchedOptions& options) {
    const auto& bg = spec.background;
    if (bg.dim() != 1) throw invalid_input("quenched_estimate: 1d background only");
    const int n = spec.cloud.size();
    Rng rng(options.seed, 31);
    if (beta_star <= 0.0) beta_star = double(spec.k);

    std::vector<Point> all = queries;
    auto xs = normalization_nodes(bg, 129);
    for (double x : xs) all.emplace_back(x);

    // per outer replica: freeze a target tuple drawn i.i.d. from nu
    std::vector<std::vector<double>> rep_phi(all.size());
    std::vector<std::vector<double>> rep_map(queries.size());
    for (int rep = 0; rep < options.outer_reps; ++rep) {
        geometry::LatticeCloud targets;
        targets.dim = bg.dim();
        targets.k = 1;  // drawn points are already the physical targets
        for (int j = 0; j < n; ++j) targets.points.push_back(target_sampler(rng));
        std::sort(targets.points.begin(), targets.points.end(), lex_less);
        auto stats = collect_row_stats(spec, targets, cost, beta_star, all,
                                       options.inner_samples, options.exact_max_n,
                                       options.sampler_sweeps, options.sampler_burn_in, rng, true);
        for (size_t q = 0; q < all.size(); ++q) {
            double acc = 0.0;
            for (double v : stats.log_per[q]) acc += v;
            rep_phi[q].push_back(acc / (options.inner_samples * beta_star));
        }
        for (size_t q = 0; q < queries.size(); ++q) {
            double acc = 0.0;
            for (const Point& b : stats.barycenter[q]) acc += b[0];
            rep_map[q].push_back(acc / options.inner_samples);
        }
    }

    auto phi_mean = [&](size_t q, int skip) {
        double acc = 0.0;
        int used = 0;
        for (int r = 0; r < options.outer_reps; ++r) {
            if (r == skip) continue;
            acc += rep_phi[q][size_t(r)];
            ++used;
        }
        return acc / used;
    };
    auto c_n = [&](int skip) {
        double h = (bg.support_hi() - bg.support_lo()) / double(xs.size() - 1);
        double acc = 0.0, mass = 0.0;
        for (size_t i = 0; i < xs.size(); ++i) {
            double w = (i == 0 || i + 1 == xs.size()) ? 0.5 : 1.0;
            double rho = bg.density(Point(xs[i]));
            acc += w * h * rho * phi_mean(queries.size() + i, skip);
            mass += w * h * rho;
        }
        return acc / mass;
    };

    QuenchedResult result;
    result.potential.resize(queries.size());
    result.map.resize(queries.size());
    double base_c = c_n(-1);
    for (size_t q = 0; q < queries.size(); ++q) {
        result.potential[q].value = phi_mean(q, -1) - base_c;
        std::vector<double> loo(static_cast<size_t>(options.outer_reps));
        for (int r = 0; r < options.outer_reps; ++r)
            loo[size_t(r)] = phi_mean(q, r) - c_n(r);
        result.potential[q].stderr_jackknife = jackknife_stderr(loo);

        double mean = 0.0;
        for (double v : rep_map[q]) mean += v;
        mean /= options.outer_reps;
        result.map[q].value = mean;
        std::vector<double> loo_map(static_cast<size_t>(options.outer_reps));
        for (int r = 0; r < options.outer_reps; ++r) {
            double acc = 0.0;
            for (int e = 0; e < options.outer_reps; ++e)
                if (e != r) acc += rep_map[q][size_t(e)];
            loo_map[size_t(r)] = acc / (options.outer_reps - 1);
        }
        result.map[q].stderr_jackknife = jackknife_stderr(loo_map);
    }
    return result;
}

// --- empirical measures -------------------------------------------------------

Configuration empirical_support(const std::vector<Configuration>& samples) {
    Configuration pooled;
    if (samples.empty()) return pooled;
    pooled.dim = samples[0].dim;
    for (const auto& conf : samples)
        for (const Point& x : conf.x) pooled.x.push_back(x);
    return pooled;
}

grid::DiscreteMeasure one_point_histogram(const std::vector<Configuration>& samples, double lo,
                                          double hi, int bins) {
    grid::DiscreteMeasure hist;
    std::vector<double> counts(static_cast<size_t>(bins), 0.0);
    long total = 0;
    for (const auto& conf : samples)
        for (const Point& x : conf.x) {
            int b = int((x[0] - lo) / (hi - lo) * bins);
            b = std::clamp(b, 0, bins - 1);
            counts[size_t(b)] += 1.0;
            ++total;
        }
    for (int b = 0; b < bins; ++b)
        hist.add(Point(lo + (b + 0.5) * (hi - lo) / bins), counts[size_t(b)] / double(total));
    return hist;
}

// --- augmented exact sampler for beta_N = k ------------------------------------

std::vector<Configuration> augmented_permanental_chain(const GibbsSpec& spec, int sweeps,
                                                       int burn_in, int thin, uint64_t seed) {
    if (spec.rule != BetaRule::EqualToK)
        throw invalid_input("augmented_permanental_chain: only the beta_N = k regime factorizes");
    const auto& bg = spec.background;
    if (bg.dim() != 1) throw invalid_input("augmented_permanental_chain: 1d only");
    const int n = spec.cloud.size();
    const int k = spec.k;
    Rng rng(seed, 41);

    // conditional tables: x | sigma(i)=j has density prop to
    // e^{x p_j - k phi0(x)} rho0(x); one inverse-CDF table per cloud point
    const int grid_nodes = 1025;
    double lo = bg.support_lo(), hi = bg.support_hi();
    double h = (hi - lo) / (grid_nodes - 1);
    std::vector<std::vector<double>> cdf(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        double pj = spec.cloud.points[size_t(j)][0];
        std::vector<double> dens(static_cast<size_t>(grid_nodes));
        double peak = kNegInf;
        for (int i = 0; i < grid_nodes; ++i) {
            double x = lo + i * h;
            peak = std::max(peak, x * pj - k * bg.weight(Point(x)));
        }
        for (int i = 0; i < grid_nodes; ++i) {
            double x = lo + i * h;
            dens[size_t(i)] = bg.density(Point(x)) *
                              std::exp(x * pj - k * bg.weight(Point(x)) - peak);
        }
        std::vector<double> c(static_cast<size_t>(grid_nodes), 0.0);
        for (int i = 1; i < grid_nodes; ++i)
            c[size_t(i)] = c[size_t(i) - 1] + 0.5 * h * (dens[size_t(i) - 1] + dens[size_t(i)]);
        for (auto& v : c) v /= c.back();
        cdf[size_t(j)] = std::move(c);
    }
    auto draw_conditional = [&](int j, Rng& r) {
        const auto& c = cdf[size_t(j)];
        double u = r.uniform();
        auto it = std::lower_bound(c.begin(), c.end(), u);
        size_t i = std::clamp<size_t>(size_t(it - c.begin()), 1, c.size() - 1);
        double frac = c[i] > c[i - 1] ? (u - c[i - 1]) / (c[i] - c[i - 1]) : 0.5;
        return lo + (double(i - 1) + frac) * h;
    };

    std::vector<int> sigma(static_cast<size_t>(n));
    std::iota(sigma.begin(), sigma.end(), 0);
    Configuration state;
    state.dim = 1;
    for (int i = 0; i < n; ++i) state.x.push_back(bg.sample(rng));

    std::vector<Configuration> kept;
    for (int sweep = 0; sweep < burn_in + sweeps; ++sweep) {
        // exact block draw of every coordinate given sigma
        for (int i = 0; i < n; ++i) state.x[size_t(i)] = Point(draw_conditional(sigma[size_t(i)], rng));
        // sigma swaps given x
        for (int t = 0; t < 4 * n; ++t) {
            int i = rng.uniform_int(n), j = rng.uniform_int(n);
            if (i == j) continue;
            double pi_ = spec.cloud.points[size_t(sigma[size_t(i)])][0];
            double pj = spec.cloud.points[size_t(sigma[size_t(j)])][0];
            double delta = (state.x[size_t(i)][0] - state.x[size_t(j)][0]) * (pj - pi_);
            if (delta >= 0.0 || std::log(rng.uniform()) < delta)
                std::swap(sigma[size_t(i)], sigma[size_t(j)]);
        }
        if (sweep >= burn_in && (sweep - burn_in) % thin == 0) kept.push_back(state);
    }
    return kept;
}

}  // namespace permot::gibbs
