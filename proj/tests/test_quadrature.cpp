#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pathhjb/errors.hpp"
#include "pathhjb/quadrature.hpp"
#include "pathhjb/rng.hpp"

using namespace pathhjb;

TEST_CASE("binary rule moments are exact") {
    for (int r : {1, 2, 3}) {
        auto q = binary_quadrature(r);
        CHECK(q.size() == (1u << r));
        validate_quadrature(q, 0.0); // exact, not just within tolerance
    }
}

TEST_CASE("binary nodes are in shock lexicographic order") {
    auto q = binary_quadrature(2);
    REQUIRE(q.size() == 4);
    CHECK(q.node(0)[0] == -1.0);
    CHECK(q.node(0)[1] == -1.0);
    CHECK(q.node(1)[0] == -1.0);
    CHECK(q.node(1)[1] == 1.0);
    CHECK(q.node(3)[0] == 1.0);
    CHECK(q.node(3)[1] == 1.0);
}

TEST_CASE("gauss-hermite rules") {
    auto q3 = gauss_hermite_quadrature(3, 1);
    REQUIRE(q3.size() == 3);
    // known closed form: nodes -sqrt(3), 0, sqrt(3); weights 1/6, 2/3, 1/6
    CHECK(q3.node(0)[0] == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-12));
    CHECK(q3.node(1)[0] == 0.0);
    CHECK(q3.node(2)[0] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(q3.weights[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(q3.weights[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    validate_quadrature(q3);

    for (int n : {2, 5, 8, 12}) {
        auto q = gauss_hermite_quadrature(n, 1);
        validate_quadrature(q);
        // degree-4 moment for n >= 3 equals the normal's 3
        if (n >= 3) {
            double m4 = 0.0;
            for (std::size_t j = 0; j < q.size(); ++j)
                m4 += q.weights[j] * std::pow(q.node(j)[0], 4);
            CHECK(m4 == doctest::Approx(3.0).epsilon(1e-10));
        }
    }
    validate_quadrature(gauss_hermite_quadrature(3, 2));
}

TEST_CASE("rule parsing") {
    CHECK(make_quadrature("binary", 1).size() == 2);
    CHECK(make_quadrature("gauss_hermite:5", 1).size() == 5);
    CHECK_THROWS_AS(make_quadrature("simpson", 1), ValidationError);
}

TEST_CASE("invalid rules are rejected") {
    QuadratureRule q = binary_quadrature(1);
    q.weights[0] = 0.6; // breaks both the sum and the mean
    CHECK_THROWS_AS(validate_quadrature(q), ValidationError);
}

TEST_CASE("counter rng is pure and well distributed") {
    CHECK(u01(7, 1, 2, 3) == u01(7, 1, 2, 3));
    CHECK(u01(7, 1, 2, 3) != u01(8, 1, 2, 3));
    CHECK(normal01(7, 1, 2, 3) == normal01(7, 1, 2, 3));

    double sum = 0.0, sum2 = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        double z = normal01(42, static_cast<std::uint64_t>(i));
        sum += z;
        sum2 += z * z;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);

    for (int i = 0; i < 1000; ++i) {
        double u = u01(3, static_cast<std::uint64_t>(i));
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
}

TEST_CASE("rng streams are independent of evaluation order") {
    RngStream a(5, 0), b(5, 0);
    double a1 = a.uniform(), a2 = a.uniform();
    CHECK(b.uniform() == a1);
    CHECK(b.uniform() == a2);
}
