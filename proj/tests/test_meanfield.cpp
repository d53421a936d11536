#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "permot/meanfield.hpp"

using namespace permot;
using namespace permot::meanfield;

namespace {

DiscreteSpace unit_space(int m) {
    DiscreteSpace space;
    for (int i = 0; i < m; ++i) {
        space.points.emplace_back(double(i) / (m - 1));
        space.mu0.push_back(1.0 / m);
        space.phi0.push_back(0.0);
    }
    return space;
}

// N = 2 lattice cloud on [-0.2, 1]: the two integer points {0, 1}
geometry::LatticeCloud two_point_cloud() {
    return geometry::lattice_points(geometry::ConvexBody::interval(-0.2, 1.0), 1);
}

}  // namespace

TEST_CASE("relative entropy worked values") {
    CHECK(relative_entropy({0.5, 0.5}, {0.5, 0.5}) == doctest::Approx(0.0));
    CHECK(relative_entropy({1.0, 0.0}, {0.5, 0.5}) == doctest::Approx(std::log(2.0)));
    CHECK(relative_entropy({0.5, 0.5}, {0.25, 0.75}) ==
          doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)).epsilon(1e-12));
    CHECK(relative_entropy({0.5, 0.5}, {1.0, 0.0}) == kInf);
}

TEST_CASE("pi_N with zero Hamiltonian is constant with fixed point 0") {
    auto space = unit_space(3);
    std::vector<double> u{0.3, -0.1, 0.5};
    auto out = pi_n(space, zero_hamiltonian(), 2, 4.0, u, space.mu0);
    CHECK(out[1] == doctest::Approx(out[0]).epsilon(1e-14));
    CHECK(out[2] == doctest::Approx(out[0]).epsilon(1e-14));
    std::vector<double> zero(3, 0.0);
    auto fixed = pi_n(space, zero_hamiltonian(), 2, 4.0, zero, space.mu0);
    for (double v : fixed) CHECK(v == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("pi_N shift equivariance is exact") {
    auto space = unit_space(4);
    auto cloud = two_point_cloud();
    auto h = permanental_hamiltonian(cloud);
    std::vector<double> u{0.2, -0.4, 0.1, 0.9};
    auto base = pi_n(space, h, 2, 3.0, u, space.mu0);
    auto shifted_in = u;
    for (auto& v : shifted_in) v += 1.0;
    auto shifted = pi_n(space, h, 2, 3.0, shifted_in, space.mu0);
    for (size_t i = 0; i < u.size(); ++i)
        CHECK(shifted[i] - base[i] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pi_N matches direct summation on a 3-state, N=2 instance") {
    DiscreteSpace space;
    space.points = {Point(0.0), Point(0.4), Point(1.0)};
    space.mu0 = {0.2, 0.5, 0.3};
    space.phi0 = {0.1, 0.0, 0.3};
    auto cloud = two_point_cloud();
    auto h = permanental_hamiltonian(cloud);
    double beta_n = 2.5;
    std::vector<double> u{0.1, -0.2, 0.4};

    auto out = pi_n(space, h, 2, beta_n, u, space.mu0);

    auto hval = [&](int i, int j) { return h({i, j}, space); };
    double z = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            z += std::exp(-beta_n * (hval(i, j) + u[size_t(i)] + u[size_t(j)])) *
                 space.mu0[size_t(i)] * space.mu0[size_t(j)];
    for (int x = 0; x < 3; ++x) {
        double num = 0.0;
        for (int j = 0; j < 3; ++j)
            num += std::exp(-beta_n * (hval(x, j) + u[size_t(j)])) * space.mu0[size_t(j)];
        CHECK(out[size_t(x)] == doctest::Approx(std::log(num / z) / beta_n).epsilon(1e-12));
    }
}

TEST_CASE("pi_N monotonicity on ordered pairs") {
    auto space = unit_space(4);
    auto cloud = two_point_cloud();
    auto h = permanental_hamiltonian(cloud);
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> u(4), w(4);
        for (int i = 0; i < 4; ++i) {
            u[size_t(i)] = rng.uniform(-1, 1);
            w[size_t(i)] = u[size_t(i)] + rng.uniform(0, 1);
        }
        auto pu = pi_n(space, h, 2, 3.0, u, space.mu0);
        auto pw = pi_n(space, h, 2, 3.0, w, space.mu0);
        for (int i = 0; i < 4; ++i) CHECK(pu[size_t(i)] <= pw[size_t(i)] + 1e-12);
    }
}

TEST_CASE("balanced fixed point on the m=4, N=2 permanental instance") {
    auto space = unit_space(4);
    auto cloud = two_point_cloud();
    auto h = permanental_hamiltonian(cloud);
    auto state = balanced_fixed_point(space, h, 2, 2.0, space.mu0, 1e-10, 200);
    CHECK(state.converged);
    CHECK(state.residual <= 1e-8);
    auto marginal = tilted_one_point(space, h, 2, 2.0, state.u, space.mu0);
    for (int i = 0; i < 4; ++i)
        CHECK(marginal[size_t(i)] == doctest::Approx(space.mu0[size_t(i)]).epsilon(1e-6));
}

TEST_CASE("pi_N of zero reproduces the untilted one-point correlation") {
    auto space = unit_space(3);
    auto cloud = two_point_cloud();
    auto h = permanental_hamiltonian(cloud);
    std::vector<double> zero(3, 0.0);
    auto mu = tilted_one_point(space, h, 2, 2.0, zero, space.mu0);
    auto out = pi_n(space, h, 2, 2.0, zero, space.mu0);
    // e^{beta_N pi(0)} mu0 = one-point correlation measure
    for (int i = 0; i < 3; ++i)
        CHECK(std::exp(2.0 * out[size_t(i)]) * space.mu0[size_t(i)] ==
              doctest::Approx(mu[size_t(i)]).epsilon(1e-10));
}

TEST_CASE("pi_N_beta shift and contraction") {
    auto space = unit_space(4);
    auto cloud = two_point_cloud();
    auto h = permanental_hamiltonian(cloud);
    const double beta_n = 4.0, beta = 2.0;
    const double factor = 1.0 - beta / beta_n;

    std::vector<double> u{0.3, -0.2, 0.0, 0.7};
    auto base = pi_n_beta(space, h, 2, beta_n, beta, u);
    auto shifted_in = u;
    for (auto& v : shifted_in) v += 1.0;
    auto shifted = pi_n_beta(space, h, 2, beta_n, beta, shifted_in);
    for (size_t i = 0; i < u.size(); ++i)
        CHECK(shifted[i] - base[i] == doctest::Approx(factor).epsilon(1e-12));

    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(4), b(4);
        for (int i = 0; i < 4; ++i) {
            a[size_t(i)] = rng.uniform(-1, 1);
            b[size_t(i)] = rng.uniform(-1, 1);
        }
        auto pa = pi_n_beta(space, h, 2, beta_n, beta, a);
        auto pb = pi_n_beta(space, h, 2, beta_n, beta, b);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < 4; ++i) {
            num = std::max(num, std::fabs(pa[size_t(i)] - pb[size_t(i)]));
            den = std::max(den, std::fabs(a[size_t(i)] - b[size_t(i)]));
        }
        CHECK(num <= factor * den + 1e-9);
    }
}

TEST_CASE("mean-field fixed point solves the finite-N equation") {
    auto space = unit_space(4);
    auto cloud = two_point_cloud();
    auto h = permanental_hamiltonian(cloud);
    const double beta_n = 4.0, beta = 1.5;
    auto state = mean_field_fixed_point(space, h, 2, beta_n, beta, 1e-13, 3000);
    CHECK(state.converged);
    double mass = 0.0;
    std::vector<double> mu_u(4);
    for (int i = 0; i < 4; ++i) {
        mu_u[size_t(i)] = std::exp(beta * state.u[size_t(i)]) * space.mu0[size_t(i)];
        mass += mu_u[size_t(i)];
    }
    CHECK(mass == doctest::Approx(1.0 - beta / beta_n).epsilon(1e-9));
    std::vector<double> mu_u_norm(4);
    for (int i = 0; i < 4; ++i) mu_u_norm[size_t(i)] = mu_u[size_t(i)] / mass;
    auto marginal = tilted_one_point(space, h, 2, beta_n, state.u, mu_u_norm);
    for (int i = 0; i < 4; ++i)
        CHECK(marginal[size_t(i)] == doctest::Approx(mu_u_norm[size_t(i)]).epsilon(1e-8));
}

TEST_CASE("zero Hamiltonian mean-field fixed point is the predicted constant") {
    auto space = unit_space(3);
    const double beta_n = 4.0, beta = 2.0;
    auto state = mean_field_fixed_point(space, zero_hamiltonian(), 2, beta_n, beta, 1e-14, 4000);
    double expected = std::log(1.0 - beta / beta_n) / beta;
    for (double v : state.u) CHECK(v == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("Gibbs variational principle is an identity") {
    auto cloud = two_point_cloud();
    auto h = permanental_hamiltonian(cloud);

    SUBCASE("hand instance m=2, N=2") {
        DiscreteSpace space;
        space.points = {Point(0.0), Point(1.0)};
        space.mu0 = {0.4, 0.6};
        space.phi0 = {0.0, 0.2};
        auto report = gibbs_variational_check(space, h, 2, 1.7, {});
        CHECK(report.identity_residual <= 1e-12);
    }

    SUBCASE("random competitors never beat the Gibbs measure") {
        auto space = unit_space(4);
        Rng rng(5);
        std::vector<std::vector<double>> competitors;
        std::vector<double> product;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                product.push_back(space.mu0[size_t(i)] * space.mu0[size_t(j)]);
        competitors.push_back(product);
        for (int t = 0; t < 10; ++t) {
            std::vector<double> mu_n(16);
            double total = 0.0;
            for (auto& v : mu_n) {
                v = rng.uniform(0.01, 1.0);
                total += v;
            }
            for (auto& v : mu_n) v /= total;
            competitors.push_back(mu_n);
        }
        auto report = gibbs_variational_check(space, h, 2, 2.0, competitors);
        CHECK(report.identity_residual <= 1e-10);
        for (double gap : report.competitor_gap) CHECK(gap >= -1e-12);
        CHECK(report.competitor_gap[0] > 0.0);
    }
}

TEST_CASE("free energy report") {
    auto space = unit_space(5);
    auto cloud = geometry::lattice_points(geometry::ConvexBody::interval(0.0, 1.0), 4);
    auto report = free_energy(space.mu0, space, cloud, 2.0);
    CHECK(report.entropy == doctest::Approx(0.0));
    CHECK(report.total == doctest::Approx(report.energy));

    std::vector<double> skew{0.6, 0.1, 0.1, 0.1, 0.1};
    auto report2 = free_energy(skew, space, cloud, 2.0);
    CHECK(report2.entropy > 0.0);
}

TEST_CASE("1d Monge-Ampere solver") {
    SUBCASE("beta = 0 monotone rearrangement, uniform to [0,1]") {
        Ma1dProblem p;
        p.beta = 0.0;
        p.rho0 = [](double) { return 1.0; };
        p.phi0 = [](double) { return 0.0; };
        p.support_lo = 0.0;
        p.support_hi = 1.0;
        p.body = geometry::ConvexBody::interval(0.0, 1.0);
        p.window = grid::Axis{0.0, 1.0, 801};
        auto sol = solve_ma_1d(p);
        for (int i = 40; i + 40 < 801; i += 40) {
            double x = p.window.node(i);
            CHECK(sol.phi.slope_central(i) == doctest::Approx(x).epsilon(1e-6));
        }
    }

    SUBCASE("beta = 0 halves the map for a doubled source interval") {
        Ma1dProblem p;
        p.beta = 0.0;
        p.rho0 = [](double) { return 0.5; };
        p.phi0 = [](double) { return 0.0; };
        p.support_lo = 0.0;
        p.support_hi = 2.0;
        p.body = geometry::ConvexBody::interval(0.0, 1.0);
        p.window = grid::Axis{0.0, 2.0, 801};
        auto sol = solve_ma_1d(p);
        for (int i = 40; i + 40 < 801; i += 40) {
            double x = p.window.node(i);
            CHECK(sol.phi.slope_central(i) == doctest::Approx(0.5 * x).epsilon(1e-6));
        }
    }

    SUBCASE("beta = 4 symmetric instance") {
        Ma1dProblem p;
        p.beta = 4.0;
        p.rho0 = [](double) { return 0.5; };
        p.phi0 = [](double x) { return x * x; };
        p.support_lo = -1.0;
        p.support_hi = 1.0;
        p.body = geometry::ConvexBody::interval(-1.0, 1.0);
        p.window = grid::Axis{-1.0, 1.0, 801};
        p.tol = 1e-9;
        auto sol = solve_ma_1d(p);
        CHECK(sol.residual <= 1e-8);
        for (int i = 0; i < 400; i += 13)
            CHECK(sol.phi.values[size_t(i)] ==
                  doctest::Approx(sol.phi.values[size_t(800 - i)]).epsilon(1e-8));

        std::vector<double> other(801);
        for (int i = 0; i < 801; ++i) {
            double x = p.window.node(i);
            other[size_t(i)] = 0.6 * x * x + 0.3;
        }
        auto sol2 = solve_ma_1d(p, &other);
        CHECK(sol2.residual <= 1e-8);
        for (int i = 0; i < 801; i += 11)
            CHECK(std::fabs(sol2.phi.values[size_t(i)] - sol.phi.values[size_t(i)]) <= 1e-6);

        double mass = 0.0, h = p.window.spacing();
        auto dens = [&](int t) {
            double x = p.window.node(t);
            return std::exp(p.beta * (sol.phi.values[size_t(t)] - p.phi0(x))) * p.rho0(x);
        };
        for (int i = 0; i + 1 < 801; ++i) mass += 0.5 * h * (dens(i) + dens(i + 1));
        CHECK(mass == doctest::Approx(p.body.volume()).epsilon(1e-6));

        // Alexandrov cell masses match the equation's right-hand side cell-wise
        std::vector<double> breaks;
        for (int i = 100; i <= 700; i += 25) breaks.push_back(p.window.node(i));
        auto mu = convexcalc::ma_measure(sol.phi, breaks, &p.body);
        for (size_t c = 0; c + 1 < breaks.size(); ++c) {
            double expected = 0.0;
            int steps = 50;
            double a = breaks[c], b = breaks[c + 1], hh = (b - a) / steps;
            auto dens_x = [&](double x) {
                double fi = (x - p.window.lo) / h;
                int base = std::clamp(int(fi), 0, 799);
                double frac = fi - base;
                double phi_x = (1 - frac) * sol.phi.values[size_t(base)] +
                               frac * sol.phi.values[size_t(base) + 1];
                return std::exp(p.beta * (phi_x - p.phi0(x))) * p.rho0(x);
            };
            for (int t = 0; t < steps; ++t)
                expected += 0.5 * hh * (dens_x(a + t * hh) + dens_x(a + (t + 1) * hh));
            CHECK(mu.mass[c] == doctest::Approx(expected).epsilon(0.02));
        }
    }
}

TEST_CASE("beta ladder marches toward the envelope") {
    Ma1dProblem p;
    p.rho0 = [](double) { return 0.5; };
    p.phi0 = [](double x) { return x * x; };
    p.support_lo = -1.0;
    p.support_hi = 1.0;
    p.body = geometry::ConvexBody::interval(-1.0, 1.0);
    p.window = grid::Axis{-1.0, 1.0, 801};
    p.tol = 1e-9;
    auto rows = beta_limit_check(p, {4.0, 8.0, 16.0}, -0.8, 0.8);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].sup_gap <= rows[0].sup_gap + 1e-9);
    CHECK(rows[2].sup_gap <= rows[1].sup_gap + 1e-9);
}

TEST_CASE("factorized partition function identity at beta_N = k") {
    auto body = geometry::ConvexBody::interval(-0.2, 1.0);
    auto cloud = geometry::lattice_points(body, 1);  // {0, 1}, N=2, k=1
    auto phi0 = [](double x) { return 0.5 * x * x; };
    auto rho0 = [](double) { return 1.0; };  // uniform on [0,1]

    const int q = 1501;
    double h = 1.0 / (q - 1);
    double z = 0.0;
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
            double x1 = i * h, x2 = j * h;
            double w = ((i == 0 || i == q - 1) ? 0.5 : 1.0) * ((j == 0 || j == q - 1) ? 0.5 : 1.0);
            double per = std::exp(x2) + std::exp(x1);  // Per(e^{x_i p_j}), p in {0,1}
            z += w * h * h * per * std::exp(-1.0 * (phi0(x1) + phi0(x2)));
        }
    double direct = std::log(z) / 2.0;  // (1/kN) log Z at k=1, N=2
    double factorized = factorized_log_z_rate(cloud, rho0, phi0, 0.0, 1.0, 3001);
    CHECK(factorized == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("mean energy check at a small scale") {
    auto body = geometry::ConvexBody::interval(0.0, 1.0);
    auto cloud = geometry::lattice_points(body, 8);  // N=9
    Rng rng(17);
    auto sampler = [](Rng& r) { return r.uniform(0.0, 3.0); };
    auto report = mean_energy_check(sampler, cloud, nullptr, 60, rng);
    CHECK(report.lower_bound_ok);
    CHECK(report.gap <= 0.15);  // generous at k=8; the acceptance suite pins k=16
}
