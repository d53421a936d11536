#include "permot/meanfield.hpp"

#include <algorithm>
#include <cmath>

namespace permot::meanfield {

namespace {

// Iterate all tuples in {0..m-1}^n; visit(state) is called with the ids.
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

double tuple_count_guard(int m, int n, double cap = 1e6) {
    double total = std::pow(double(m), double(n));
    if (total > cap)
        throw invalid_input("meanfield: exact tensor mode capped at m^N <= 1e6");
    return total;
}

}  // namespace

void DiscreteSpace::validate() const {
    if (points.empty() || points.size() != mu0.size() || points.size() != phi0.size())
        throw invalid_input("DiscreteSpace: inconsistent sizes");
    double total = 0.0;
    for (double w : mu0) {
        if (w <= 0.0) throw invalid_input("DiscreteSpace: weights must be positive");
        total += w;
    }
    if (std::fabs(total - 1.0) > 1e-9)
        throw invalid_input("DiscreteSpace: weights must sum to 1");
}

HamiltonianFn permanental_hamiltonian(const geometry::LatticeCloud& cloud) {
    return [cloud](const std::vector<int>& ids, const DiscreteSpace& space) {
        Configuration conf;
        conf.dim = space.points[0].dim;
        for (int id : ids) conf.x.push_back(space.points[size_t(id)]);
        double h = -perm::log_permanent(perm::kernel(conf, cloud)) / cloud.k;
        for (int id : ids) h += space.phi0[size_t(id)];
        return h;
    };
}

HamiltonianFn zero_hamiltonian() {
    return [](const std::vector<int>&, const DiscreteSpace&) { return 0.0; };
}

double relative_entropy(const std::vector<double>& mu, const std::vector<double>& mu0) {
    if (mu.size() != mu0.size()) throw invalid_input("relative_entropy: size mismatch");
    double d = 0.0;
    for (size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] == 0.0) continue;  // 0 log 0 = 0
        if (mu0[i] == 0.0) return kInf;
        d += mu[i] * std::log(mu[i] / mu0[i]);
    }
    return d;
}

std::vector<double> pi_n(const DiscreteSpace& space, const HamiltonianFn& h, int n_particles,
                         double beta_n, const std::vector<double>& u,
                         const std::vector<double>& mu) {
    space.validate();
    const int m = space.size();
    if (n_particles < 1) throw invalid_input("pi_n: N >= 1");
    tuple_count_guard(m, n_particles - 1);
    std::vector<double> log_mu(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) log_mu[size_t(i)] = std::log(mu[size_t(i)]);

    // log Z_N[u] over the full N-fold tensor
    double log_z = kNegInf;
    for_each_tuple(m, n_particles, [&](const std::vector<int>& state) {
        double t = -beta_n * h(state, space);
        for (int id : state) t += -beta_n * u[size_t(id)] + log_mu[size_t(id)];
        log_z = log_add(log_z, t);
    });

    std::vector<double> out(static_cast<size_t>(m));
    std::vector<int> state(static_cast<size_t>(n_particles));
    for (int x = 0; x < m; ++x) {
        double acc = kNegInf;
        state[0] = x;
        if (n_particles == 1) {
            acc = -beta_n * h(state, space);
        } else {
            for_each_tuple(m, n_particles - 1, [&](const std::vector<int>& companions) {
                for (int j = 0; j + 1 < n_particles; ++j)
                    state[size_t(j) + 1] = companions[size_t(j)];
                double t = -beta_n * h(state, space);
                for (int j = 1; j < n_particles; ++j)
                    t += -beta_n * u[size_t(state[size_t(j)])] + log_mu[size_t(state[size_t(j)])];
                acc = log_add(acc, t);
            });
        }
        out[size_t(x)] = (acc - log_z) / beta_n;
    }
    return out;
}

std::vector<double> tilted_one_point(const DiscreteSpace& space, const HamiltonianFn& h,
                                     int n_particles, double beta_n,
                                     const std::vector<double>& u, const std::vector<double>& mu) {
    space.validate();
    const int m = space.size();
    tuple_count_guard(m, n_particles);
    std::vector<double> log_marg(static_cast<size_t>(m), kNegInf);
    double log_z = kNegInf;
    for_each_tuple(m, n_particles, [&](const std::vector<int>& state) {
        double t = -beta_n * h(state, space);
        for (int id : state) t += -beta_n * u[size_t(id)] + std::log(mu[size_t(id)]);
        log_z = log_add(log_z, t);
        log_marg[size_t(state[0])] = log_add(log_marg[size_t(state[0])], t);
    });
    std::vector<double> out(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) out[size_t(i)] = std::exp(log_marg[size_t(i)] - log_z);
    return out;
}

MeanFieldState balanced_fixed_point(const DiscreteSpace& space, const HamiltonianFn& h,
                                    int n_particles, double beta_n,
                                    const std::vector<double>& mu, double tol, int max_iter) {
    MeanFieldState st;
    st.u.assign(static_cast<size_t>(space.size()), 0.0);
    for (st.iterations = 0; st.iterations < max_iter;) {
        auto next = pi_n(space, h, n_particles, beta_n, st.u, mu);
        double anchor = next[0];
        for (double& v : next) v -= anchor;  // normalization u(x0) = 0
        double r = 0.0;
        for (size_t i = 0; i < next.size(); ++i) r = std::max(r, std::fabs(next[i] - st.u[i]));
        st.u = std::move(next);
        st.residual = r;
        st.residual_history.push_back(r);
        ++st.iterations;
        if (r <= tol) {
            st.converged = true;
            break;
        }
    }
    return st;
}

std::vector<double> pi_n_beta(const DiscreteSpace& space, const HamiltonianFn& h, int n_particles,
                              double beta_n, double beta, const std::vector<double>& u) {
    space.validate();
    if (beta <= 0.0 || beta >= beta_n)
        throw invalid_input("pi_n_beta: requires 0 < beta < beta_N");
    const int m = space.size();
    tuple_count_guard(m, n_particles);
    // base measure mu_u = e^{beta u} mu0 (not renormalized)
    std::vector<double> log_mu_u(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i)
        log_mu_u[size_t(i)] = beta * u[size_t(i)] + std::log(space.mu0[size_t(i)]);

    double log_z = kNegInf;
    for_each_tuple(m, n_particles, [&](const std::vector<int>& state) {
        double t = -beta_n * h(state, space);
        for (int id : state) t += -beta_n * u[size_t(id)] + log_mu_u[size_t(id)];
        log_z = log_add(log_z, t);
    });

    std::vector<double> out(static_cast<size_t>(m));
    std::vector<int> state(static_cast<size_t>(n_particles));
    const double log_prefactor = std::log1p(-beta / beta_n);
    for (int x = 0; x < m; ++x) {
        double acc = kNegInf;
        state[0] = x;
        if (n_particles == 1) {
            acc = -beta_n * h(state, space);
        } else {
            for_each_tuple(m, n_particles - 1, [&](const std::vector<int>& companions) {
                for (int j = 0; j + 1 < n_particles; ++j)
                    state[size_t(j) + 1] = companions[size_t(j)];
                double t = -beta_n * h(state, space);
                for (int j = 1; j < n_particles; ++j)
                    t += -beta_n * u[size_t(state[size_t(j)])] + log_mu_u[size_t(state[size_t(j)])];
                acc = log_add(acc, t);
            });
        }
        out[size_t(x)] = (log_prefactor + acc - log_z) / beta_n;
    }
    return out;
}

MeanFieldState mean_field_fixed_point(const DiscreteSpace& space, const HamiltonianFn& h,
                                      int n_particles, double beta_n, double beta, double tol,
                                      int max_iter) {
    MeanFieldState st;
    st.u.assign(static_cast<size_t>(space.size()), 0.0);
    for (st.iterations = 0; st.iterations < max_iter;) {
        auto next = pi_n_beta(space, h, n_particles, beta_n, beta, st.u);
        double r = 0.0;
        for (size_t i = 0; i < next.size(); ++i) r = std::max(r, std::fabs(next[i] - st.u[i]));
        st.u = std::move(next);
        st.residual = r;
        st.residual_history.push_back(r);
        ++st.iterations;
        if (r <= tol) {
            st.converged = true;
            break;
        }
    }
    return st;
}

GibbsVariationalReport gibbs_variational_check(
    const DiscreteSpace& space, const HamiltonianFn& h, int n_particles, double beta,
    const std::vector<std::vector<double>>& competitors) {
    space.validate();
    const int m = space.size();
    double tuples = tuple_count_guard(m, n_particles);
    const auto count = static_cast<size_t>(tuples);

    std::vector<double> h_table(count), log_prod(count);
    {
        size_t idx = 0;
        for_each_tuple(m, n_particles, [&](const std::vector<int>& state) {
            double lp = 0.0;
            for (int id : state) lp += std::log(space.mu0[size_t(id)]);
            h_table[idx] = h(state, space);
            log_prod[idx] = lp;
            ++idx;
        });
    }
    double log_z = kNegInf;
    for (size_t t = 0; t < count; ++t) log_z = log_add(log_z, -beta * h_table[t] + log_prod[t]);

    auto free_energy_of = [&](const std::vector<double>& mu_n) {
        double e = 0.0, d = 0.0;
        for (size_t t = 0; t < count; ++t) {
            if (mu_n[t] == 0.0) continue;
            e += h_table[t] * mu_n[t];
            d += mu_n[t] * (std::log(mu_n[t]) - log_prod[t]);
        }
        return (e + d / beta) / n_particles;
    };

    std::vector<double> gibbs(count);
    for (size_t t = 0; t < count; ++t)
        gibbs[t] = std::exp(-beta * h_table[t] + log_prod[t] - log_z);

    GibbsVariationalReport report;
    report.log_z = log_z;
    report.gibbs_free_energy = free_energy_of(gibbs);
    report.identity_residual = std::fabs(beta * report.gibbs_free_energy + log_z / n_particles);
    for (const auto& mu_n : competitors) {
        if (mu_n.size() != count)
            throw invalid_input("gibbs_variational_check: competitor table size mismatch");
        report.competitor_gap.push_back(free_energy_of(mu_n) - report.gibbs_free_energy);
    }
    return report;
}

FreeEnergyReport free_energy(const std::vector<double>& mu, const DiscreteSpace& space,
                             const geometry::LatticeCloud& cloud, double beta) {
    space.validate();
    if (mu.size() != space.mu0.size()) throw invalid_input("free_energy: size mismatch");
    const int n = cloud.size();

    // stratified resampling of mu to N atoms at the quantiles (i+1/2)/N
    std::vector<double> cdf(mu.size());
    double running = 0.0;
    for (size_t i = 0; i < mu.size(); ++i) {
        running += mu[i];
        cdf[i] = running;
    }
    std::vector<int> atom_ids;
    for (int i = 0; i < n; ++i) {
        double q = (i + 0.5) / n;
        size_t idx = size_t(std::lower_bound(cdf.begin(), cdf.end(), q) - cdf.begin());
        idx = std::min(idx, mu.size() - 1);
        atom_ids.push_back(int(idx));
    }
    assign::CostMatrix cost = assign::CostMatrix::zeros(n);
    for (int i = 0; i < n; ++i) {
        const Point& x = space.points[size_t(atom_ids[size_t(i)])];
        double w = space.phi0[size_t(atom_ids[size_t(i)])];
        for (int j = 0; j < n; ++j) cost.at(i, j) = -dot(x, cloud.scaled(j)) + w;
    }
    FreeEnergyReport report;
    report.energy = assign::min_cost_assignment(cost).normalized;
    report.entropy = relative_entropy(mu, space.mu0);
    report.beta = beta;
    report.total = std::isinf(beta) ? report.energy : report.energy + report.entropy / beta;
    return report;
}

namespace {

void thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                  std::vector<double>& upper, std::vector<double>& rhs) {
    const size_t n = diag.size();
    for (size_t i = 1; i < n; ++i) {
        double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

Ma1dSolution solve_ma_1d(const Ma1dProblem& problem, const std::vector<double>* initial_guess) {
    const grid::Axis& window = problem.window;
    const int nodes = window.count;
    const double h = window.spacing();
    const double a = -problem.body.support(Point(-1.0));
    const double b = problem.body.support(Point(1.0));

    std::vector<double> rho(static_cast<size_t>(nodes)), w0(static_cast<size_t>(nodes));
    for (int i = 0; i < nodes; ++i) {
        double x = window.node(i);
        rho[size_t(i)] = (x >= problem.support_lo - 1e-12 && x <= problem.support_hi + 1e-12)
                             ? problem.rho0(x)
                             : 0.0;
        w0[size_t(i)] = problem.phi0(x);
    }

    Ma1dSolution sol;
    if (problem.beta == 0.0) {
        // monotone rearrangement: phi'(x) = a + (b-a) F_{mu0}(x)
        std::vector<double> cdf(static_cast<size_t>(nodes), 0.0);
        double mass = 0.0;
        for (int i = 1; i < nodes; ++i) {
            mass += 0.5 * h * (rho[size_t(i - 1)] + rho[size_t(i)]);
            cdf[size_t(i)] = mass;
        }
        for (auto& c : cdf) c /= mass;  // defend against quadrature mass error
        std::vector<double> phi(static_cast<size_t>(nodes), 0.0);
        auto slope = [&](int i) { return a + (b - a) * cdf[size_t(i)]; };
        for (int i = 1; i < nodes; ++i)
            phi[size_t(i)] = phi[size_t(i - 1)] + 0.5 * h * (slope(i - 1) + slope(i));
        // normalization: integral of phi against mu0 vanishes
        double avg = 0.0;
        for (int i = 1; i < nodes; ++i)
            avg += 0.5 * h *
                   (phi[size_t(i - 1)] * rho[size_t(i - 1)] + phi[size_t(i)] * rho[size_t(i)]);
        for (auto& v : phi) v -= avg;
        grid::GridFunction g;
        g.dim = 1;
        g.ax = window;
        g.values = std::move(phi);
        sol.phi = grid::ConvexGridFunction::certify(g);
        sol.residual = 0.0;
        return sol;
    }

    // damped Newton on phi'' = e^{beta(phi - phi0)} rho0 with Neumann data
    // phi'(lo) = a, phi'(hi) = b (ghost-node elimination at the window ends)
    std::vector<double> phi(static_cast<size_t>(nodes));
    if (initial_guess) {
        if (static_cast<int>(initial_guess->size()) != nodes)
            throw invalid_input("solve_ma_1d: initial guess size mismatch");
        phi = *initial_guess;
    } else {
        grid::GridFunction obstacle;
        obstacle.dim = 1;
        obstacle.ax = window;
        obstacle.values = w0;
        auto env = convexcalc::envelope(obstacle, problem.body, 2049);
        phi = env.values;
    }

    auto g_eval = [&](int i, double t) {
        double e = problem.beta * (t - w0[size_t(i)]);
        return rho[size_t(i)] * std::exp(std::min(e, 60.0));
    };
    auto residual_vec = [&](const std::vector<double>& p) {
        std::vector<double> f(static_cast<size_t>(nodes));
        f[0] = 2.0 * (p[1] - p[0] - h * a) / (h * h) - g_eval(0, p[0]);
        for (int i = 1; i + 1 < nodes; ++i)
            f[size_t(i)] = (p[size_t(i) + 1] - 2.0 * p[size_t(i)] + p[size_t(i) - 1]) / (h * h) -
                           g_eval(i, p[size_t(i)]);
        f[size_t(nodes) - 1] =
            2.0 * (p[size_t(nodes) - 2] - p[size_t(nodes) - 1] + h * b) / (h * h) -
            g_eval(nodes - 1, p[size_t(nodes) - 1]);
        return f;
    };
    auto inf_norm = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double t : v) m = std::max(m, std::fabs(t));
        return m;
    };

    std::vector<double> f = residual_vec(phi);
    double fnorm = inf_norm(f);
    for (int iter = 0; iter < problem.max_iter && fnorm > problem.tol; ++iter) {
        std::vector<double> lower(static_cast<size_t>(nodes), 0.0),
            diag(static_cast<size_t>(nodes), 0.0), upper(static_cast<size_t>(nodes), 0.0),
            rhs(static_cast<size_t>(nodes));
        const double ih2 = 1.0 / (h * h);
        for (int i = 0; i < nodes; ++i) {
            double gp = problem.beta * g_eval(i, phi[size_t(i)]);
            diag[size_t(i)] = -2.0 * ih2 - gp;
            if (i == 0) upper[0] = 2.0 * ih2;
            else if (i == nodes - 1) lower[size_t(i)] = 2.0 * ih2;
            else {
                lower[size_t(i)] = ih2;
                upper[size_t(i)] = ih2;
            }
            rhs[size_t(i)] = -f[size_t(i)];
        }
        thomas_solve(lower, diag, upper, rhs);  // rhs becomes the Newton step
        double lambda = 1.0;
        bool moved = false;
        for (int halving = 0; halving < 40; ++halving) {
            std::vector<double> trial = phi;
            for (int i = 0; i < nodes; ++i) trial[size_t(i)] += lambda * rhs[size_t(i)];
            auto ft = residual_vec(trial);
            double fn = inf_norm(ft);
            if (fn < fnorm) {
                phi = std::move(trial);
                f = std::move(ft);
                fnorm = fn;
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        sol.damping_history.push_back(moved ? lambda : 0.0);
        ++sol.newton_iterations;
        if (!moved) break;  // stagnation; the damping history explains
    }
    grid::GridFunction g;
    g.dim = 1;
    g.ax = window;
    g.values = phi;
    sol.phi = grid::ConvexGridFunction::certify(g);
    sol.residual = fnorm;
    return sol;
}

std::vector<BetaLadderRow> beta_limit_check(const Ma1dProblem& base,
                                            const std::vector<double>& betas,
                                            double subwindow_lo, double subwindow_hi) {
    grid::GridFunction obstacle;
    obstacle.dim = 1;
    obstacle.ax = base.window;
    obstacle.values.resize(static_cast<size_t>(base.window.count));
    for (int i = 0; i < base.window.count; ++i)
        obstacle.values[size_t(i)] = base.phi0(base.window.node(i));
    auto env = convexcalc::envelope(obstacle, base.body, 4097);

    std::vector<BetaLadderRow> rows;
    std::vector<double> warm;
    for (double beta : betas) {
        Ma1dProblem p = base;
        p.beta = beta;
        auto sol = solve_ma_1d(p, warm.empty() ? nullptr : &warm);
        warm = sol.phi.values;
        double gap = 0.0;
        for (int i = 0; i < base.window.count; ++i) {
            double x = base.window.node(i);
            if (x < subwindow_lo || x > subwindow_hi) continue;
            gap = std::max(gap, std::fabs(sol.phi.values[size_t(i)] - env.values[size_t(i)]));
        }
        rows.push_back({beta, gap});
    }
    return rows;
}

MeanEnergyReport mean_energy_check(const std::function<double(Rng&)>& mu_sampler,
                                   const geometry::LatticeCloud& cloud,
                                   const std::function<double(const Point&)>& weight, int trials,
                                   Rng& rng) {
    const int n = cloud.size();
    std::vector<double> h_vals, c_vals;
    for (int t = 0; t < trials; ++t) {
        Configuration conf;
        conf.dim = cloud.dim;
        for (int i = 0; i < n; ++i) conf.x.emplace_back(mu_sampler(rng));
        h_vals.push_back(perm::hamiltonian(conf, cloud, weight) / n);
        assign::CostMatrix cost = assign::CostMatrix::zeros(n);
        for (int i = 0; i < n; ++i) {
            double w = weight ? weight(conf.x[size_t(i)]) : 0.0;
            for (int j = 0; j < n; ++j)
                cost.at(i, j) = -dot(conf.x[size_t(i)], cloud.scaled(j)) + w;
        }
        c_vals.push_back(assign::min_cost_assignment(cost).normalized);
    }
    MeanEnergyReport report;
    double hm = 0.0, cm = 0.0;
    for (int t = 0; t < trials; ++t) {
        hm += h_vals[size_t(t)];
        cm += c_vals[size_t(t)];
    }
    hm /= trials;
    cm /= trials;
    double var = 0.0;
    for (int t = 0; t < trials; ++t) var += (h_vals[size_t(t)] - hm) * (h_vals[size_t(t)] - hm);
    report.mc_mean = hm;
    report.mc_stderr = trials > 1 ? std::sqrt(var / (trials - 1.0) / trials) : 0.0;
    report.surrogate = cm;
    report.gap = std::fabs(hm - cm);
    double slack = log_factorial(n) / (double(n) * cloud.k) + 3.0 * report.mc_stderr;
    report.lower_bound_ok = hm >= cm - slack;
    return report;
}

double factorized_log_z_rate(const geometry::LatticeCloud& cloud,
                             const std::function<double(double)>& rho0,
                             const std::function<double(double)>& phi0, double support_lo,
                             double support_hi, int quad_nodes) {
    const int n = cloud.size();
    const int k = cloud.k;
    const double h = (support_hi - support_lo) / (quad_nodes - 1);
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        double q = cloud.scaled(j)[0];
        // log of the trapezoid integral of e^{k(qx - phi0(x))} rho0(x)
        double peak = kNegInf;
        for (int i = 0; i < quad_nodes; ++i) {
            double x = support_lo + i * h;
            peak = std::max(peak, double(k) * (q * x - phi0(x)));
        }
        double acc = 0.0;
        for (int i = 0; i < quad_nodes; ++i) {
            double x = support_lo + i * h;
            double wq = (i == 0 || i == quad_nodes - 1) ? 0.5 : 1.0;
            acc += wq * h * rho0(x) * std::exp(double(k) * (q * x - phi0(x)) - peak);
        }
        sum += (peak + std::log(acc)) / k;
    }
    return sum / n + log_factorial(n) / (double(n) * k);
}

}  // namespace permot::meanfield
