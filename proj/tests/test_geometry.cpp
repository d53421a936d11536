#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "permot/geometry.hpp"
#include "permot/rng.hpp"

using namespace permot;
using geometry::ConvexBody;
using geometry::lattice_points;

TEST_CASE("support function on segments and boxes") {
    auto seg = ConvexBody::interval(-1.0, 1.0);
    CHECK(seg.support(Point(2.0)) == doctest::Approx(2.0));

    auto box = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
    CHECK(box.support(Point(3.0, -2.0)) == doctest::Approx(5.0));
}

TEST_CASE("support function of a shifted simplex") {
    // conv{(0,0),(1,0),(0,1)} shifted by (-1/4,-1/4)
    auto simplex = ConvexBody::from_vertices(
        2, {Point(-0.25, -0.25), Point(0.75, -0.25), Point(-0.25, 0.75)});
    CHECK(simplex.support(Point(1.0, 1.0)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("support function from an H-representation only") {
    auto box = ConvexBody::from_halfspaces(
        2, {{Point(1.0, 0.0), 1.0}, {Point(-1.0, 0.0), 1.0},
            {Point(0.0, 1.0), 1.0}, {Point(0.0, -1.0), 1.0}});
    CHECK(box.support(Point(3.0, -2.0)) == doctest::Approx(5.0));
    CHECK(box.volume() == doctest::Approx(4.0));
}

TEST_CASE("support function homogeneity and subadditivity") {
    Rng rng(11);
    auto tri = ConvexBody::from_vertices(2, {Point(-1.0, -0.5), Point(2.0, -0.5), Point(0.0, 1.5)});
    for (int trial = 0; trial < 200; ++trial) {
        Point x(rng.uniform(-3, 3), rng.uniform(-3, 3));
        Point y(rng.uniform(-3, 3), rng.uniform(-3, 3));
        double t = rng.uniform(0, 4);
        CHECK(tri.support(t * x) == doctest::Approx(t * tri.support(x)).epsilon(1e-10));
        CHECK(tri.support(x + y) <= tri.support(x) + tri.support(y) + 1e-10);
    }
}

TEST_CASE("lattice enumeration") {
    auto seg = ConvexBody::interval(-1.0, 1.0);
    auto cloud = lattice_points(seg, 2);
    REQUIRE(cloud.size() == 5);
    for (int j = 0; j < 5; ++j) CHECK(cloud.points[size_t(j)][0] == doctest::Approx(j - 2.0));

    auto box = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
    CHECK(lattice_points(box, 1).size() == 9);

    auto tiny = ConvexBody::interval(-0.4, 0.4);
    auto only_origin = lattice_points(tiny, 1);
    REQUIRE(only_origin.size() == 1);
    CHECK(only_origin.points[0][0] == doctest::Approx(0.0));
}

TEST_CASE("lattice ordering is lexicographic and deterministic") {
    auto box = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
    auto cloud = lattice_points(box, 2);
    for (int j = 1; j < cloud.size(); ++j)
        CHECK(lex_less(cloud.points[size_t(j - 1)], cloud.points[size_t(j)]));
}

TEST_CASE("origin is always in the cloud") {
    // 0 lies in P by the standing assumption, so N >= 1 for every valid body
    auto tiny = ConvexBody::from_vertices(1, {Point(-0.4), Point(0.3)});
    auto cloud = lattice_points(tiny, 1);
    REQUIRE(cloud.size() == 1);
    CHECK(cloud.points[0][0] == doctest::Approx(0.0));
}

TEST_CASE("discrete volume property for boxes") {
    auto box = ConvexBody::box({-1.0, -0.7}, {0.9, 1.1});
    const int n = 2;
    for (int k : {4, 8, 16, 32}) {
        auto cloud = lattice_points(box, k);
        double ratio = double(cloud.size()) / std::pow(double(k), n);
        CHECK(std::fabs(ratio - box.volume()) <= 3.0 * n / double(k));
    }
}

TEST_CASE("barycenter and invariant R") {
    auto sym = ConvexBody::interval(-1.0, 1.0);
    CHECK(sym.barycenter()[0] == doctest::Approx(0.0));
    CHECK(sym.invariant_r() == doctest::Approx(1.0));

    auto skew = ConvexBody::interval(-1.0, 2.0);
    CHECK(skew.barycenter()[0] == doctest::Approx(0.5));
    CHECK(skew.invariant_r() == doctest::Approx(1.0 / 1.5).epsilon(1e-12));

    auto box = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
    CHECK(box.invariant_r() == doctest::Approx(1.0));
}

TEST_CASE("invariant R is 1 for centrally symmetric bodies") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        double a = rng.uniform(0.5, 2.0), b = rng.uniform(0.5, 2.0);
        auto hexagon = ConvexBody::from_vertices(
            2, {Point(a, 0.0), Point(-a, 0.0), Point(0.4 * a, b), Point(-0.4 * a, -b),
                Point(-0.4 * a, b), Point(0.4 * a, -b)});
        CHECK(hexagon.invariant_r() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("volume and membership") {
    CHECK(ConvexBody::interval(-1.0, 1.0).volume() == doctest::Approx(2.0));
    CHECK(ConvexBody::box({0.0, 0.0}, {1.0, 1.0}).volume() == doctest::Approx(1.0));

    auto box = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
    CHECK(box.contains(Point(0.5, -0.5)));
    CHECK(!box.contains(Point(1.1, 0.0)));
}

TEST_CASE("3d volume and barycenter by decomposition") {
    auto cube = ConvexBody::box({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5});
    CHECK(cube.volume() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(norm(cube.barycenter()) == doctest::Approx(0.0).epsilon(1e-9));

    auto tet = ConvexBody::from_vertices(
        3, {Point(-0.25, -0.25, -0.25), Point(1.0, -0.25, -0.25), Point(-0.25, 1.0, -0.25),
            Point(-0.25, -0.25, 1.0)});
    CHECK(tet.volume() == doctest::Approx(1.25 * 1.25 * 1.25 / 6.0).epsilon(1e-9));
}

TEST_CASE("invalid bodies are rejected") {
    CHECK_THROWS_AS((void)ConvexBody::interval(0.5, 2.0), invalid_input);  // origin outside
    CHECK_THROWS_AS((void)ConvexBody::from_halfspaces(1, {{Point(1.0), 1.0}}), invalid_input);
    CHECK_THROWS_AS((void)ConvexBody::box({-1, -1, -1, -1}, {1, 1, 1, 1}), invalid_input);
}

TEST_CASE("json body round trip") {
    auto body = geometry::body_from_json_text(
        R"({"dim": 2, "vertices": [[-1,-1],[1,-1],[1,1],[-1,1]]})");
    CHECK(body.volume() == doctest::Approx(4.0));
    auto hbody = geometry::body_from_json_text(
        R"({"dim": 1, "halfspaces": [{"normal":[1],"offset":1.0},{"normal":[-1],"offset":0.5}]})");
    CHECK(hbody.support(Point(1.0)) == doctest::Approx(1.0));
    CHECK(hbody.support(Point(-1.0)) == doctest::Approx(0.5));
}
