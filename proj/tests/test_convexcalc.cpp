#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "permot/convexcalc.hpp"
#include "permot/rng.hpp"

using namespace permot;
using namespace permot::convexcalc;
using geometry::ConvexBody;

TEST_CASE("legendre transform worked examples") {
    Axis xax{-5.0, 5.0, 2001};

    SUBCASE("quadratic is self dual") {
        auto phi = GridFunction::sample1d(xax, [](double x) { return 0.5 * x * x; });
        auto dual = legendre1d(phi, Axis{-1.0, 1.0, 101});
        double h = xax.spacing();
        for (int i = 0; i < 101; ++i) {
            double p = dual.ax.node(i);
            CHECK(std::fabs(dual.at(i) - 0.5 * p * p) <= h * h / 2.0 + 1e-12);
        }
    }

    SUBCASE("absolute value dualizes to the indicator") {
        auto phi = GridFunction::sample1d(xax, [](double x) { return std::fabs(x); });
        auto dual = legendre1d(phi, Axis{-1.0, 1.0, 41});
        for (int i = 0; i < 41; ++i) CHECK(dual.at(i) == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("x^2 at p=1") {
        auto phi = GridFunction::sample1d(Axis{-5.0, 5.0, 20001}, [](double x) { return x * x; });
        auto dual = legendre1d(phi, Axis{1.0 - 1e-9, 1.0, 2});
        CHECK(dual.at(1) == doctest::Approx(0.25).epsilon(1e-6));
    }

    SUBCASE("refining the X grid never decreases the transform") {
        auto coarse = GridFunction::sample1d(Axis{-5.0, 5.0, 101},
                                             [](double x) { return std::cosh(x); });
        auto fine = GridFunction::sample1d(Axis{-5.0, 5.0, 401},
                                           [](double x) { return std::cosh(x); });
        auto dc = legendre1d(coarse, Axis{-1.0, 1.0, 41});
        auto df = legendre1d(fine, Axis{-1.0, 1.0, 41});
        for (int i = 0; i < 41; ++i) CHECK(df.at(i) >= dc.at(i) - 1e-12);
    }
}

TEST_CASE("envelope of x^2 against P=[-1,1]") {
    auto body = ConvexBody::interval(-1.0, 1.0);
    auto phi0 = GridFunction::sample1d(Axis{-3.0, 3.0, 1201}, [](double x) { return x * x; });
    auto env = envelope(phi0, body, 2049);
    double h = phi0.ax.spacing();

    auto truth = [](double x) {
        return std::fabs(x) <= 0.5 ? x * x : std::fabs(x) - 0.25;
    };
    for (int i = 0; i < env.ax.count; i += 7) {
        double x = env.ax.node(i);
        CHECK(std::fabs(env.at(i) - truth(x)) <= 2.0 * h + 1e-9);
        CHECK(env.at(i) <= phi0.at(i) + 1e-12);
    }
    // phi_e(1) = 0.75
    int idx = int(std::lround((1.0 - env.ax.lo) / h));
    CHECK(std::fabs(env.at(idx) - 0.75) <= 2.0 * h);
}

TEST_CASE("envelope fixes admissible convex functions") {
    auto body = ConvexBody::interval(-1.0, 1.0);
    // already convex with slopes in [-1,1] on the window
    auto phi0 = GridFunction::sample1d(Axis{-1.0, 1.0, 401},
                                       [](double x) { return 0.4 * x * x; });
    auto env = envelope(phi0, body, 4097);
    for (int i = 0; i < env.ax.count; ++i)
        CHECK(env.at(i) == doctest::Approx(phi0.at(i)).epsilon(1e-6));
}

TEST_CASE("two point mask gives the cone through both obstacle points") {
    auto body = ConvexBody::interval(-1.0, 1.0);
    Axis ax{-1.0, 1.0, 201};
    GridFunction phi0;
    phi0.dim = 1;
    phi0.ax = ax;
    phi0.values.assign(201, kInf);
    phi0.values[0] = 1.0;    // x=-1, phi=1
    phi0.values[200] = 1.0;  // x=+1, phi=1
    auto env = envelope(phi0, body, 4097);
    // the flat chord through (-1,1) and (1,1) dominates every admissible
    // competitor, so the envelope is constant 1 between the pins
    CHECK(env.at(100) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(env.at(0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(env.at(150) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("envelope idempotence") {
    auto body = ConvexBody::interval(-1.0, 1.0);
    auto phi0 = GridFunction::sample1d(Axis{-2.0, 2.0, 801},
                                       [](double x) { return x * x - 0.3 * std::sin(3 * x); });
    auto env1 = envelope(phi0, body, 2049);
    auto env2 = envelope(env1, body, 2049);
    for (int i = 0; i < env1.ax.count; ++i)
        CHECK(std::fabs(env2.at(i) - env1.at(i)) <= 1e-9 * std::max(1.0, std::fabs(env1.at(i))));
}

TEST_CASE("biconjugate identity: the transform does not see the projection") {
    auto body = ConvexBody::interval(-1.0, 1.0);
    Rng rng(4);
    for (int trial = 0; trial < 6; ++trial) {
        double a = rng.uniform(0.5, 2.0), b = rng.uniform(-0.5, 0.5);
        auto phi0 = GridFunction::sample1d(Axis{-3.0, 3.0, 1501}, [&](double x) {
            return a * x * x + b * std::sin(4.0 * x);
        });
        auto env = envelope(phi0, body, 2049);
        Axis pax{-1.0, 1.0, 81};
        auto dual_env = legendre1d(env, pax);
        auto dual_phi = legendre1d(phi0, pax);
        double tol = 2.0 * phi0.ax.spacing() * body.diameter();
        for (int i = 0; i < pax.count; ++i)
            CHECK(std::fabs(dual_env.at(i) - dual_phi.at(i)) <= tol);
    }
}

TEST_CASE("1d Monge-Ampere measures") {
    SUBCASE("kink atom") {
        auto g = GridFunction::sample1d(Axis{-1.0, 1.0, 401}, [](double x) { return std::fabs(x); });
        auto phi = ConvexGridFunction::certify(g);
        auto mu = ma_measure(phi, {-0.3, 0.3});
        CHECK(mu.total() == doctest::Approx(2.0).epsilon(1e-9));
    }
    SUBCASE("identity gradient") {
        auto g = GridFunction::sample1d(Axis{-1.0, 1.0, 401}, [](double x) { return 0.5 * x * x; });
        auto phi = ConvexGridFunction::certify(g);
        auto mu = ma_measure(phi, {-0.4, 0.25});
        CHECK(mu.total() == doctest::Approx(0.65).epsilon(1e-9));
    }
}

TEST_CASE("2d Monge-Ampere by dual counting") {
    auto body = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
    auto g = GridFunction::sample2d(Axis{-2.0, 2.0, 161}, Axis{-2.0, 2.0, 161},
                                    [](const Point& x) { return 0.5 * dot(x, x); });
    auto phi = ConvexGridFunction::certify(g);
    auto mu = ma_measure2d(phi, body, 201);
    CHECK(mu.total() == doctest::Approx(body.volume()).epsilon(1e-9));
    // mass of the disc of radius 1/2 under the identity gradient is pi/4
    double disc = 0.0;
    for (size_t i = 0; i < mu.support.size(); ++i)
        if (norm(mu.support[i]) <= 0.5) disc += mu.mass[i];
    CHECK(disc == doctest::Approx(M_PI / 4.0).epsilon(0.02));
}

TEST_CASE("energy functional") {
    auto body = ConvexBody::interval(-1.0, 1.0);

    SUBCASE("support function has zero energy") {
        auto phi = support_restriction(body, Axis{-6.0, 6.0, 2401});
        CHECK(energy(phi, body) == doctest::Approx(0.0).epsilon(1e-6));
    }
    SUBCASE("constants shift energy by the constant") {
        auto phi = support_restriction(body, Axis{-6.0, 6.0, 2401});
        auto shifted = phi;
        for (auto& v : shifted.values) v += 1.3;
        CHECK(energy(ConvexGridFunction::certify(shifted), body) -
                  energy(phi, body) ==
              doctest::Approx(1.3).epsilon(1e-9));
    }
    SUBCASE("quadratic closed form") {
        auto g = GridFunction::sample1d(Axis{-5.0, 5.0, 4001},
                                        [](double x) { return 0.5 * x * x; });
        auto phi = ConvexGridFunction::certify(g);
        CHECK(energy(phi, body) == doctest::Approx(-1.0 / 6.0).epsilon(1e-4));
    }
}

TEST_CASE("comparison principle") {
    auto body = ConvexBody::interval(-1.0, 1.0);
    Axis ax{-1.0, 1.0, 201};  // 0.6 lands on a node

    SUBCASE("worked pair x^2/2 vs 0.3|x|") {
        auto u = ConvexGridFunction::certify(
            GridFunction::sample1d(ax, [](double x) { return 0.5 * x * x; }));
        auto vg = GridFunction::sample1d(ax, [](double x) { return 0.3 * std::fabs(x); });
        vg.extension = grid::Extension::PlusInf;
        auto v = ConvexGridFunction::certify(vg);
        auto rep = check_comparison(u, v, body);
        CHECK(rep.lhs == doctest::Approx(0.6).epsilon(1e-9));
        CHECK(rep.rhs == doctest::Approx(1.2).epsilon(1e-9));
        CHECK(rep.holds);
    }

    SUBCASE("identical inputs hold with empty strict set") {
        auto u = ConvexGridFunction::certify(
            GridFunction::sample1d(ax, [](double x) { return 0.5 * x * x; }));
        auto rep = check_comparison(u, u, body);
        CHECK(rep.lhs == doctest::Approx(0.0));
        CHECK(rep.rhs == doctest::Approx(0.0));
        CHECK(rep.holds);
    }

    SUBCASE("random piecewise-quadratic convex pairs") {
        Rng rng(6);
        for (int trial = 0; trial < 100; ++trial) {
            double a1 = rng.uniform(0.3, 1.0), c1 = rng.uniform(-0.2, 0.2);
            double s2 = rng.uniform(0.1, 0.9), c2 = rng.uniform(-0.2, 0.2);
            auto u = ConvexGridFunction::certify(GridFunction::sample1d(ax, [&](double x) {
                return a1 * x * x + c1;
            }));
            auto vg = GridFunction::sample1d(ax, [&](double x) {
                return s2 * std::fabs(x - 0.1) + c2;
            });
            vg.extension = grid::Extension::PlusInf;
            auto v = ConvexGridFunction::certify(vg);
            bool u_full = std::fabs(ma_total_mass(u, &body) - body.volume()) <= 0.01 * body.volume();
            if (!u_full) continue;  // slope range must cover P for the principle
            auto rep = check_comparison(u, v, body);
            CHECK(rep.holds);
        }
    }
}

TEST_CASE("full-mass precondition is enforced") {
    auto body = ConvexBody::interval(-1.0, 1.0);
    Axis ax{-1.0, 1.0, 101};
    // slope range [-0.2, 0.2] with affine extension: mass 0.4 << vol 2
    auto u = ConvexGridFunction::certify(
        GridFunction::sample1d(ax, [](double x) { return 0.1 * x * x; }));
    auto v = ConvexGridFunction::certify(
        GridFunction::sample1d(ax, [](double x) { return 0.05 * x * x; }));
    CHECK_THROWS_AS((void)check_comparison(u, v, body), invalid_input);
}

TEST_CASE("domination principle") {
    auto body = ConvexBody::interval(-1.0, 1.0);
    Axis ax{-4.0, 4.0, 801};
    auto u = support_restriction(body, ax);
    auto v = u;
    for (auto& val : v.values) val -= 1.0;
    auto rep = check_domination(u, ConvexGridFunction::certify(v), body);
    CHECK(rep.hypothesis);
    CHECK(rep.conclusion);

    // a genuine violation is located
    auto w = u;
    for (auto& val : w.values) val += 0.5;
    auto rep2 = check_domination(u, ConvexGridFunction::certify(w), body);
    CHECK(!rep2.conclusion);
    CHECK(rep2.first_violation >= 0);
}

TEST_CASE("ma mass of the support function restriction") {
    auto body = ConvexBody::interval(-1.0, 1.0);
    auto phi = support_restriction(body, Axis{-4.0, 4.0, 1601});
    double mass = ma_total_mass(phi, &body);
    CHECK(std::fabs(mass - body.volume()) <= 0.01 * body.volume());
}

TEST_CASE("incidence set contains the support of the envelope measure") {
    auto body = ConvexBody::interval(-1.0, 1.0);
    Axis ax{-3.0, 3.0, 1201};
    auto phi0 = GridFunction::sample1d(ax, [](double x) { return x * x; });
    auto env = envelope(phi0, body, 4097);
    auto nodes = incidence_set(phi0, env, 1e-4);
    // incidence set should cover [-0.5, 0.5]
    double lo = kInf, hi = -kInf;
    for (int i : nodes) {
        lo = std::min(lo, ax.node(i));
        hi = std::max(hi, ax.node(i));
    }
    CHECK(lo <= -0.49);
    CHECK(hi >= 0.49);

    std::vector<double> breaks;
    for (int i = 0; i < ax.count; ++i) breaks.push_back(ax.node(i));
    auto mu = ma_measure(env, breaks, &body);
    for (size_t c = 0; c < mu.mass.size(); ++c) {
        if (mu.mass[c] <= 1e-9) continue;
        double x = mu.support[c][0];
        CHECK(x >= lo - 2 * ax.spacing());
        CHECK(x <= hi + 2 * ax.spacing());
    }
}

TEST_CASE("energy differential identity") {
    auto body = ConvexBody::interval(-1.0, 1.0);
    Axis ax{-3.0, 3.0, 601};
    auto phi0 = GridFunction::sample1d(ax, [](double x) { return x * x; });
    auto u = [](double x) { return std::cos(2.0 * x); };

    const double t = 1e-3;
    auto plus = GridFunction::sample1d(ax, [&](double x) { return x * x + t * u(x); });
    auto minus = GridFunction::sample1d(ax, [&](double x) { return x * x - t * u(x); });
    double e_plus = energy(envelope(plus, body, 2049), body);
    double e_minus = energy(envelope(minus, body, 2049), body);
    double derivative = (e_plus - e_minus) / (2.0 * t);

    auto env = envelope(phi0, body, 2049);
    std::vector<double> breaks;
    for (int i = 0; i < ax.count; ++i) breaks.push_back(ax.node(i));
    auto mu = ma_measure(env, breaks, &body);
    double pairing = 0.0;
    for (size_t c = 0; c < mu.mass.size(); ++c)
        pairing += u(mu.support[c][0]) * mu.mass[c] / body.volume();
    CHECK(std::fabs(derivative - pairing) <= 1e-2);  // ||u||_inf = 1
}

TEST_CASE("non-convex certification fails") {
    auto g = GridFunction::sample1d(Axis{-1.0, 1.0, 101}, [](double x) { return -x * x; });
    CHECK_THROWS_AS((void)ConvexGridFunction::certify(g), invalid_input);
}

#include "permot/assignment.hpp"

TEST_CASE("the envelope measure minimizes the weighted transport cost") {
    auto body = ConvexBody::interval(-1.0, 1.0);
    Axis ax{-2.0, 2.0, 801};
    auto weight = [](double x) { return x * x; };
    auto phi0 = GridFunction::sample1d(ax, weight);
    auto env = envelope(phi0, body, 2049);
    std::vector<double> breaks;
    for (int i = 0; i < ax.count; ++i) breaks.push_back(ax.node(i));
    auto mu_e = ma_measure(env, breaks, &body);

    auto cloud = geometry::lattice_points(body, 12);  // N = 25 atoms of lambda_P
    const int n = cloud.size();

    // stratified resampling of a discrete measure on the window to N atoms
    auto cost_of = [&](const grid::DiscreteMeasure& mu) {
        double total_mass = mu.total();
        std::vector<double> cdf(mu.mass.size());
        double run = 0.0;
        for (size_t c = 0; c < mu.mass.size(); ++c) {
            run += mu.mass[c] / total_mass;
            cdf[c] = run;
        }
        assign::CostMatrix cost = assign::CostMatrix::zeros(n);
        for (int i = 0; i < n; ++i) {
            double q = (i + 0.5) / n;
            size_t idx = size_t(std::lower_bound(cdf.begin(), cdf.end(), q) - cdf.begin());
            idx = std::min(idx, mu.mass.size() - 1);
            double x = mu.support[idx][0];
            for (int j = 0; j < n; ++j)
                cost.at(i, j) = -x * cloud.scaled(j)[0] + weight(x);
        }
        return assign::min_cost_assignment(cost).normalized;
    };

    double envelope_cost = cost_of(mu_e);
    Rng rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        grid::DiscreteMeasure competitor;
        for (int c = 0; c < 40; ++c)
            competitor.add(Point(rng.uniform(-2.0, 2.0)), rng.uniform(0.05, 1.0));
        // the cloud discretization carries O(1/k) bias, hence the slack
        CHECK(cost_of(competitor) >= envelope_cost - 0.02);
    }
}

TEST_CASE("2d Legendre transform of the self-dual quadratic") {
    auto phi = GridFunction::sample2d(Axis{-3.0, 3.0, 121}, Axis{-3.0, 3.0, 121},
                                      [](const Point& x) { return 0.5 * dot(x, x); });
    GridFunction target;
    target.dim = 2;
    target.ax = Axis{-1.0, 1.0, 21};
    target.ay = Axis{-1.0, 1.0, 21};
    target.values.assign(21 * 21, 0.0);
    auto dual = legendre(phi, target);
    double h = phi.ax.spacing();
    for (int t = 0; t < dual.node_count(); t += 17) {
        Point p = dual.node(t);
        CHECK(std::fabs(dual.at(t) - 0.5 * dot(p, p)) <= h * h + 1e-12);
    }
}

TEST_CASE("2d envelope against the box target") {
    auto body = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
    auto phi0 = GridFunction::sample2d(Axis{-2.0, 2.0, 81}, Axis{-2.0, 2.0, 81},
                                       [](const Point& x) { return 0.5 * dot(x, x); });
    auto env = envelope(phi0, body, 65);
    // inside the gradient-admissible square the envelope touches the obstacle;
    // outside it continues with slopes capped at the box faces
    auto truth = [](const Point& x) {
        double v = 0.0;
        for (int d = 0; d < 2; ++d) {
            double a = std::fabs(x[d]);
            v += a <= 1.0 ? 0.5 * a * a : a - 0.5;
        }
        return v;
    };
    for (int t = 0; t < env.node_count(); t += 37) {
        Point x = env.node(t);
        CHECK(std::fabs(env.at(t) - truth(x)) <= 0.12);  // coarse grids, O(h) near the seam
        CHECK(env.at(t) <= phi0.at(t) + 1e-9);
    }
}
