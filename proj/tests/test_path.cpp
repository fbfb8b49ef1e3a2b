#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "pathhjb/config.hpp"
#include "pathhjb/errors.hpp"
#include "pathhjb/path.hpp"
#include "test_support.hpp"

using namespace pathhjb;
using namespace pathhjb::testing;

TEST_CASE("validation rejects malformed paths") {
    SampledPath p;
    p.dim = 1;
    p.grid = {0.0, 1.0, 1.0};
    p.values = {0.0, 1.0, 2.0};
    CHECK_THROWS_AS(validate_path(p), ValidationError);
    p.grid = {0.1, 1.0};
    p.values = {0.0, 1.0};
    CHECK_THROWS_AS(validate_path(p), ValidationError);
    p.grid = {0.0, 1.0};
    p.values = {0.0, std::nan("")};
    CHECK_THROWS_AS(validate_path(p), ValidationError);
}

TEST_CASE("interpolation and constant extension") {
    auto p = make_path1({0.0, 1.0, 2.0}, {0.0, 2.0, -1.0});
    CHECK(eval_path1(p, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(eval_path1(p, 1.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(eval_path1(p, 5.0) == -1.0); // constant past the last knot
}

TEST_CASE("stop: identity at the horizon, constants invariant") {
    auto p = make_path1({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0});
    CHECK(paths_equal(stop(p, 2.0), p));
    auto c = const_path1(3.5, 2.0);
    CHECK(paths_equal(stop(c, 0.7), c));
}

TEST_CASE("stop: linear path frozen at the stop time") {
    auto p = make_path1({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0});
    auto s = stop(p, 1.0);
    REQUIRE(s.grid.size() == 3);
    CHECK(s.values[0] == 0.0);
    CHECK(s.values[1] == 1.0);
    CHECK(s.values[2] == 1.0);
    CHECK_THROWS_AS(stop(p, 2.5), ValidationError);
    CHECK_THROWS_AS(stop(p, -0.5), ValidationError);
}

TEST_CASE("stop composes through the minimum on grid times") {
    for (std::uint64_t i = 0; i < 32; ++i) {
        auto p = random_path1(21, i, 2.0, 2.0, 8);
        RngStream rng(77, i);
        double t = p.grid[rng.below(p.grid.size())];
        double s = p.grid[rng.below(p.grid.size())];
        auto lhs = stop(stop(p, t), s);
        auto rhs = stop(p, std::min(s, t));
        REQUIRE(lhs.grid == rhs.grid);
        REQUIRE(lhs.values == rhs.values); // grid times: exact representation
    }
}

TEST_CASE("concat: splice at zero and zero-increment continuation") {
    auto p = make_path1({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0});
    auto q = make_path1({0.0, 0.5, 2.0}, {0.0, -1.0, 4.0});
    CHECK(paths_equal(concat(p, 0.0, q), q, 1e-15));

    auto c = const_path1(9.0, 1.0); // increments are zero
    CHECK(paths_equal(concat(p, 1.0, c), stop(p, 1.0), 1e-15));
}

TEST_CASE("concat: hand-evaluated splice") {
    auto p = make_path1({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0});
    auto q = make_path1({0.0, 1.0}, {5.0, 7.0});
    auto r = concat(p, 1.0, q);
    REQUIRE(r.grid.size() == 3);
    CHECK(r.grid[2] == 2.0);
    CHECK(r.values[0] == 0.0);
    CHECK(r.values[1] == 1.0);
    CHECK(r.values[2] == 3.0);

    SampledPath wrong_dim;
    wrong_dim.dim = 2;
    wrong_dim.grid = {0.0};
    wrong_dim.values = {1.0, 2.0};
    CHECK_THROWS_AS(concat(p, 1.0, wrong_dim), ValidationError);
}

TEST_CASE("concat restricted to [0,t] equals stop, and is non-anticipative") {
    for (std::uint64_t i = 0; i < 48; ++i) {
        auto p = random_path1(31, i, 2.0, 2.0, 6);
        auto q = random_path1(32, i, 2.0, 1.0, 5);
        RngStream rng(33, i);
        double t = rng.uniform(0.0, 2.0);
        auto joined = concat(p, t, q);
        auto stopped = stop(p, t);
        for (double u = 0.0; u <= t; u += t / 7.0 + 1e-9)
            CHECK(eval_path1(joined, u) == eval_path1(stopped, u));
        // changing p strictly after t must not change the result
        auto frozen_first = concat(stop(p, t), t, q);
        CHECK(paths_equal(frozen_first, joined, 0.0));
    }
}

TEST_CASE("sup_norm examples") {
    auto c = const_path1(-2.5, 1.0);
    CHECK(sup_norm(c, 1.0) == 2.5);
    auto p = make_path1({0.0, 1.0}, {0.0, -3.0});
    CHECK(sup_norm(p, 1.0) == 3.0);
    auto k = make_path1({0.0, 1.0, 2.0}, {1.0, -2.0, 0.0});
    CHECK(sup_norm(k, 2.0) == 2.0);
    CHECK(sup_norm(k, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("metric_d examples") {
    auto zero = const_path1(0.0, 1.0);
    TimedPath a{1.0, zero}, b{0.0, zero};
    CHECK(metric_d(a, a, 1.0) == 0.0);
    CHECK(metric_d(a, b, 1.0) == 1.0);

    auto w = make_path1({0.0, 2.0}, {0.0, 2.0});      // slope 1
    auto al = make_path1({0.0, 2.0}, {0.0, 4.0});     // slope 2
    TimedPath tw{2.0, w}, ta{1.0, al};
    CHECK(metric_d(tw, ta, 2.0) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(metric_dstar(tw, ta, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(metric_dstar(a, a, 1.0) == 0.0);
    CHECK(metric_dstar(a, b, 1.0) == 1.0);
}

// metric_dstar is a genuine pseudometric. metric_d is a Lipschitz modulus,
// not a pseudometric: its growth prefactor couples the two points, and
// d((T, A), (0, -A)) exceeds the route through (0, 0) by exactly A*sqrt(T)
// for constant paths of any height A > 0. What does hold on norm-bounded
// families is the quasi-triangle inequality with factor (1 + 2R).
TEST_CASE("metric axioms over random triples") {
    const double T = 1.0;
    const double R = 2.0;
    std::size_t checked = 0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        RngStream rng(101, i);
        TimedPath x{rng.uniform(0.0, T), random_path1(102, 3 * i, R, T, 5)};
        TimedPath y{rng.uniform(0.0, T), random_path1(102, 3 * i + 1, R, T, 5)};
        TimedPath z{rng.uniform(0.0, T), random_path1(102, 3 * i + 2, R, T, 5)};

        CHECK(metric_d(x, y, T) == metric_d(y, x, T)); // symmetry, exact
        CHECK(metric_dstar(x, y, T) == metric_dstar(y, x, T));
        CHECK(metric_d(x, x, T) == 0.0);
        CHECK(metric_d(x, y, T) >= 0.0);

        // full triangle inequality for the plain modulus
        CHECK(metric_dstar(x, y, T) <=
              metric_dstar(x, z, T) + metric_dstar(z, y, T) + 1e-12);
        // quasi-triangle for the weighted modulus on the R-bounded family
        CHECK(metric_d(x, y, T) <=
              (1.0 + 2.0 * R) * (metric_d(x, z, T) + metric_d(z, y, T)) + 1e-12);
        ++checked;
    }
    CHECK(checked == 10000);
}

TEST_CASE("weighted modulus triangle counterexample is real") {
    const double T = 1.0, A = 0.5;
    TimedPath x{T, const_path1(A, T)};
    TimedPath y{0.0, const_path1(-A, T)};
    TimedPath z{0.0, const_path1(0.0, T)};
    double direct = metric_d(x, y, T);
    double routed = metric_d(x, z, T) + metric_d(z, y, T);
    CHECK(direct - routed == doctest::Approx(A * std::sqrt(T)).epsilon(1e-12));
    CHECK(direct > routed + 1e-3);
}

TEST_CASE("plain modulus keeps the triangle inequality on unbounded norms") {
    const double T = 2.0;
    for (std::uint64_t i = 0; i < 2000; ++i) {
        RngStream rng(151, i);
        TimedPath x{rng.uniform(0.0, T), random_path1(152, 3 * i, 4.0, T, 5)};
        TimedPath y{rng.uniform(0.0, T), random_path1(152, 3 * i + 1, 4.0, T, 5)};
        TimedPath z{rng.uniform(0.0, T), random_path1(152, 3 * i + 2, 4.0, T, 5)};
        CHECK(metric_dstar(x, y, T) <=
              metric_dstar(x, z, T) + metric_dstar(z, y, T) + 1e-12);
    }
}

TEST_CASE("path JSON round trip") {
    auto p = random_path1(55, 3, 2.0, 1.0, 6);
    auto q = path_from_json(path_to_json(p));
    CHECK(q.dim == p.dim);
    REQUIRE(q.grid == p.grid);
    CHECK(q.values == p.values);
}
