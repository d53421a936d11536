#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "permot/assignment.hpp"
#include "permot/rng.hpp"

using namespace permot;
using namespace permot::assign;

namespace {

CostMatrix random_matrix(int n, Rng& rng, double lo = -5.0, double hi = 5.0) {
    CostMatrix c = CostMatrix::zeros(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c.at(i, j) = rng.uniform(lo, hi);
    return c;
}

}  // namespace

TEST_CASE("worked 2x2 instances") {
    CostMatrix c = CostMatrix::zeros(2);
    c.at(0, 0) = 0;
    c.at(0, 1) = 2;
    c.at(1, 0) = 3;
    c.at(1, 1) = 1;
    auto r = min_cost_assignment(c);
    CHECK(r.sigma == std::vector<int>{0, 1});
    CHECK(r.total == doctest::Approx(1.0));
    CHECK(r.normalized == doctest::Approx(0.5));
}

TEST_CASE("zero diagonal through a permuted 0/1 matrix") {
    CostMatrix c = CostMatrix::zeros(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c.at(i, j) = (j == (i + 1) % 3) ? 0.0 : 1.0;
    auto r = min_cost_assignment(c);
    CHECK(r.total == doctest::Approx(0.0));
    CHECK(r.sigma == std::vector<int>{1, 2, 0});
}

TEST_CASE("tie-break returns the lexicographically smallest optimum") {
    CostMatrix c = CostMatrix::zeros(2);
    c.at(0, 0) = 1;
    c.at(0, 1) = 2;
    c.at(1, 0) = 3;
    c.at(1, 1) = 4;
    // both permutations cost 5
    auto r = min_cost_assignment(c);
    CHECK(r.total == doctest::Approx(5.0));
    CHECK(r.sigma == std::vector<int>{0, 1});

    CostMatrix constant = CostMatrix::zeros(4);
    for (auto& v : constant.c) v = 2.5;
    auto rc = min_cost_assignment(constant);
    CHECK(rc.sigma == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("solver matches exhaustive enumeration for N <= 8") {
    Rng rng(42);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 2 + rng.uniform_int(7);
        CostMatrix c = random_matrix(n, rng);
        auto fast = min_cost_assignment(c);
        auto slow = min_cost_assignment_bruteforce(c);
        CHECK(fast.total == doctest::Approx(slow.total).epsilon(1e-12));
    }
}

TEST_CASE("kantorovich LP equals the assignment optimum (Birkhoff)") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        CostMatrix c = random_matrix(6, rng);
        auto lp = kantorovich_lp(c);
        auto match = min_cost_assignment(c);
        CHECK(lp.value == doctest::Approx(match.normalized).epsilon(1e-9));
        // coupling doubly stochastic at scale 1/N
        for (int i = 0; i < 6; ++i) {
            double row = 0.0, col = 0.0;
            for (int j = 0; j < 6; ++j) {
                row += lp.coupling[size_t(i) * 6 + size_t(j)];
                col += lp.coupling[size_t(j) * 6 + size_t(i)];
            }
            CHECK(row == doctest::Approx(1.0 / 6).epsilon(1e-9));
            CHECK(col == doctest::Approx(1.0 / 6).epsilon(1e-9));
        }
    }
}

TEST_CASE("kantorovich LP on a constant matrix stays doubly stochastic") {
    CostMatrix c = CostMatrix::zeros(4);
    for (auto& v : c.c) v = 3.0;
    auto lp = kantorovich_lp(c);
    CHECK(lp.value == doctest::Approx(3.0));
    for (int i = 0; i < 4; ++i) {
        double row = 0.0;
        for (int j = 0; j < 4; ++j) row += lp.coupling[size_t(i) * 4 + size_t(j)];
        CHECK(row == doctest::Approx(0.25).epsilon(1e-9));
    }
}

TEST_CASE("wasserstein1 basics") {
    Configuration a{1, {Point(0.0), Point(1.0), Point(2.0)}};
    Configuration b{1, {Point(2.0), Point(0.0), Point(1.0)}};
    CHECK(wasserstein1(a, b) == doctest::Approx(0.0));

    Configuration d0{1, {Point(0.0)}};
    Configuration d1{1, {Point(1.0)}};
    CHECK(wasserstein1(d0, d1) == doctest::Approx(1.0));

    Configuration x{1, {Point(0.0), Point(1.0)}};
    Configuration y{1, {Point(1.0), Point(0.0)}};
    CHECK(wasserstein1(x, y) == doctest::Approx(0.0));

    Configuration bad{1, {Point(0.0)}};
    CHECK_THROWS_AS((void)wasserstein1(x, bad), invalid_input);
}

TEST_CASE("wasserstein1 triangle inequality on random triples") {
    Rng rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 2 + rng.uniform_int(5);
        auto draw = [&] {
            Configuration c{2, {}};
            for (int i = 0; i < n; ++i) c.x.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
            return c;
        };
        auto a = draw(), b = draw(), c = draw();
        CHECK(wasserstein1(a, c) <= wasserstein1(a, b) + wasserstein1(b, c) + 1e-9);
    }
}

TEST_CASE("1d sorted optimal assignment for cost -x.p is the identity") {
    Rng rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 3 + rng.uniform_int(5);
        std::vector<double> xs(static_cast<size_t>(n)), ps(static_cast<size_t>(n));
        for (auto& v : xs) v = rng.uniform(-2, 2);
        for (auto& v : ps) v = rng.uniform(-2, 2);
        std::sort(xs.begin(), xs.end());
        std::sort(ps.begin(), ps.end());
        CostMatrix c = CostMatrix::zeros(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) c.at(i, j) = -xs[size_t(i)] * ps[size_t(j)];
        auto r = min_cost_assignment(c);
        for (int i = 0; i < n; ++i) CHECK(r.sigma[size_t(i)] == i);
    }
}

TEST_CASE("semidiscrete cost") {
    auto body = geometry::ConvexBody::interval(-1.0, 1.0);
    auto cloud = geometry::lattice_points(body, 2);  // {-2..2}, N=5
    Configuration at_zero{1, std::vector<Point>(5, Point(0.0))};
    CHECK(semidiscrete_cost(at_zero, cloud, nullptr) == doctest::Approx(0.0));

    // adding a constant to phi0 adds the constant to the cost
    Configuration spread{1, {Point(-0.9), Point(-0.3), Point(0.1), Point(0.4), Point(0.8)}};
    double base = semidiscrete_cost(spread, cloud, [](const Point&) { return 0.0; });
    double shifted = semidiscrete_cost(spread, cloud, [](const Point&) { return 0.7; });
    CHECK(shifted - base == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("semidiscrete cost approximates the monotone rearrangement value") {
    // mu0 uniform on [0,1], P=[0,1]: optimal map is the identity and the cost
    // is -int x^2 dx = -1/3; the cloud surrogate carries O(1/k) bias.
    auto body = geometry::ConvexBody::interval(0.0, 1.0);
    auto cloud = geometry::lattice_points(body, 16);
    const int n = cloud.size();
    Configuration samples{1, {}};
    for (int i = 0; i < n; ++i) samples.x.emplace_back((i + 0.5) / double(n));
    double cost = semidiscrete_cost(samples, cloud, nullptr);
    CHECK(cost == doctest::Approx(-1.0 / 3.0).epsilon(0.06));
}

TEST_CASE("dual certificate rejects corrupted duals") {
    // the public API certifies internally; this exercises a larger instance
    Rng rng(17);
    CostMatrix c = random_matrix(25, rng, 0.0, 10.0);
    auto r = min_cost_assignment(c);
    double direct = 0.0;
    for (int i = 0; i < 25; ++i) direct += c.at(i, r.sigma[size_t(i)]);
    CHECK(direct == doctest::Approx(r.total));
}

TEST_CASE("non-finite costs are rejected rather than modelled") {
    CostMatrix c = CostMatrix::zeros(2);
    c.at(0, 1) = kInf;
    CHECK_THROWS_AS((void)min_cost_assignment(c), invalid_input);
    CHECK_THROWS_AS((void)kantorovich_lp(c), invalid_input);
}
