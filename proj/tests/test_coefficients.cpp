#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "pathhjb/coefficients.hpp"
#include "pathhjb/config.hpp"
#include "pathhjb/errors.hpp"
#include "test_support.hpp"

using namespace pathhjb;
using namespace pathhjb::testing;

namespace {

ControlPoint cp(double f1, double f2) {
    ControlPoint p;
    p.coords = {f1, f2};
    return p;
}

double drift1(const CoefficientField& c, const ControlPoint& f, double t,
              const SampledPath& w) {
    double out;
    c.drift(f, t, w, &out);
    return out;
}

double sigma1(const CoefficientField& c, const ControlPoint& f, double t,
              const SampledPath& w) {
    double out;
    c.diffusion(f, t, w, &out);
    return out;
}

} // namespace

TEST_CASE("control grid enumeration") {
    auto g = make_control_grid({2, 3});
    REQUIRE(g.size() == 6);
    CHECK(g.point(0).coords == std::vector<double>{0.0, 0.0});
    CHECK(g.point(1).coords == std::vector<double>{0.0, 0.5});
    CHECK(g.point(2).coords == std::vector<double>{0.0, 1.0});
    CHECK(g.point(3).coords == std::vector<double>{1.0, 0.0});
    CHECK(g.point(5).coords == std::vector<double>{1.0, 1.0});

    auto degenerate = make_control_grid({1, 2});
    REQUIRE(degenerate.size() == 2);
    CHECK(degenerate.point(0).coords == std::vector<double>{0.0, 0.0});
    CHECK(degenerate.point(1).coords == std::vector<double>{0.0, 1.0});
}

TEST_CASE("random-g field evaluators") {
    auto w = const_path1(0.3, 1.0);

    auto degenerate = const_random_g(0.0, 0.0, 1.0, 1.0, terminal_identity());
    for (double f1 : {0.0, 0.3, 1.0})
        for (double f2 : {0.0, 0.5, 1.0}) {
            CHECK(drift1(degenerate, cp(f1, f2), 0.2, w) == 0.0);
            CHECK(sigma1(degenerate, cp(f1, f2), 0.2, w) == 1.0);
        }

    auto c = const_random_g(-1.0, 2.0, 1.0, 3.0, terminal_identity());
    CHECK(drift1(c, cp(1.0, 0.0), 0.0, w) == 2.0);
    CHECK(drift1(c, cp(0.0, 0.0), 0.0, w) == -1.0);
    CHECK(sigma1(c, cp(0.0, 0.5), 0.0, w) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("random-g construction rejects bad bound specs") {
    RandomGSpec bad;
    bad.b_lo = bound_constant(0.0);
    bad.b_hi = bound_constant(0.0);
    bad.a_lo = bound_constant(-0.5); // must be positive
    bad.a_hi = bound_constant(1.0);
    bad.bound_C = 2.0;
    CHECK_THROWS_AS(make_random_g(bad, 1.0, terminal_identity().path), ValidationError);

    RandomGSpec flipped;
    flipped.b_lo = bound_constant(1.0);
    flipped.b_hi = bound_constant(-1.0); // b_lo > b_hi
    flipped.a_lo = bound_constant(1.0);
    flipped.a_hi = bound_constant(1.0);
    flipped.bound_C = 2.0;
    CHECK_THROWS_AS(make_random_g(flipped, 1.0, terminal_identity().path), ValidationError);
}

TEST_CASE("non-anticipativity validator") {
    auto probes = make_probe_set(9, 64, 2.0, 1.0, 8, 2);

    // running-max dependence is fine
    RandomGSpec spec;
    spec.b_lo = bound_constant(0.0);
    spec.b_hi = bound_constant(0.5);
    spec.a_lo = bound_constant(1.0);
    spec.a_hi = bound_running_max(1.0, 0.3, 1.0, 2.0);
    spec.bound_C = 2.5;
    auto good = make_random_g(spec, 1.0, terminal_identity().path);
    auto rep = validate_nonanticipativity(good, probes);
    CHECK(rep.pass);
    CHECK(rep.max_discrepancy == 0.0);

    // a field reading omega(horizon) inside the drift must be caught
    CoefficientField peek = good;
    peek.drift = [](const ControlPoint&, double, const SampledPath& w, double* out) {
        out[0] = eval_path1(w, w.horizon());
    };
    auto bad = validate_nonanticipativity(peek, probes);
    CHECK_FALSE(bad.pass);
    CHECK(bad.max_discrepancy > 0.1);

    auto constant = const_random_g(0.1, 0.2, 1.0, 1.5, terminal_identity());
    auto crep = validate_nonanticipativity(constant, probes);
    CHECK(crep.pass);
    CHECK(crep.max_discrepancy == 0.0);
}

TEST_CASE("growth validator") {
    auto probes = make_probe_set(10, 64, 3.0, 1.0, 8, 2);

    CoefficientField zero;
    zero.dim_d = zero.dim_r = 1;
    zero.action_dim = 2;
    zero.horizon_T = 1.0;
    zero.growth_C = 1.0;
    zero.drift = [](const ControlPoint&, double, const SampledPath&, double* out) { out[0] = 0.0; };
    zero.diffusion = zero.drift;
    zero.terminal = [](const SampledPath&) { return 0.0; };
    CHECK(validate_growth(zero, probes).estimate == 0.0);

    CoefficientField supc = zero;
    supc.drift = [](const ControlPoint&, double t, const SampledPath& w, double* out) {
        out[0] = sup_norm(w, std::min(t, w.horizon()));
    };
    auto rep = validate_growth(supc, probes);
    CHECK(rep.estimate <= 1.0);
    CHECK(rep.estimate > 0.1);

    auto rg = const_random_g(-1.0, 2.0, 1.0, 3.0, terminal_identity(), 1.0, 3.0);
    auto grep = validate_growth(rg, probes);
    CHECK(grep.pass);
    CHECK(grep.estimate <= 3.0 + std::sqrt(3.0));
}

TEST_CASE("path-lipschitz validator") {
    auto pairs = make_probe_pairs(11, 64, 2.0, 1.0, 8, 2);

    auto constant = const_random_g(0.1, 0.2, 1.0, 1.5, terminal_identity());
    CHECK(validate_path_lipschitz(constant, pairs) == 0.0);

    CoefficientField ident;
    ident.dim_d = ident.dim_r = 1;
    ident.action_dim = 2;
    ident.horizon_T = 1.0;
    ident.growth_C = 1.0;
    ident.drift = [](const ControlPoint&, double t, const SampledPath& w, double* out) {
        out[0] = eval_path1(w, std::min(t, w.horizon()));
    };
    ident.diffusion = [](const ControlPoint&, double, const SampledPath&, double* out) {
        out[0] = 0.0;
    };
    ident.terminal = [](const SampledPath&) { return 0.0; };
    double est = validate_path_lipschitz(ident, pairs);
    CHECK(est <= 1.0 + 1e-12);

    // a pair differing only at the evaluation time attains the ratio 1
    Probe p;
    p.f = cp(0.0, 0.0);
    p.t = 1.0;
    p.omega = const_path1(0.0, 1.0);
    std::vector<std::pair<Probe, SampledPath>> manual{{p, const_path1(0.5, 1.0)}};
    CHECK(validate_path_lipschitz(ident, manual) == doctest::Approx(1.0).epsilon(1e-14));

    CoefficientField sine = ident;
    sine.drift = [](const ControlPoint&, double t, const SampledPath& w, double* out) {
        out[0] = std::sin(sup_norm(w, std::min(t, w.horizon())));
    };
    CHECK(validate_path_lipschitz(sine, pairs) <= 1.0 + 1e-12);
}

TEST_CASE("compact convergence gaps") {
    auto probes = make_probe_set(12, 96, 2.0, 1.0, 8, 2);

    Json base = {
        {"b_lo", {{"kind", "constant"}, {"value", 0.0}}},
        {"b_hi", {{"kind", "constant"}, {"value", 1.0}}},
        {"a_lo", {{"kind", "constant"}, {"value", 1.0}}},
        {"a_hi", {{"kind", "constant"}, {"value", 2.0}}},
        {"bound_C", 3.0},
        {"horizon_T", 1.0},
        {"terminal", {{"kind", "identity"}}}};

    auto constant = sequence_from_json(Json{{"kind", "constant"}, {"base", base}});
    auto g0 = compact_convergence_gap(constant, 5, probes);
    CHECK(g0.gap_b == 0.0);
    CHECK(g0.gap_sigma == 0.0);
    CHECK(g0.gap_psi == 0.0);

    auto shifted = sequence_from_json(Json{{"kind", "b_shift"}, {"base", base}, {"scale", 1.0}});
    for (int n : {1, 2, 8}) {
        auto g = compact_convergence_gap(shifted, n, probes);
        CHECK(g.gap_b == doctest::Approx(1.0 / n).epsilon(1e-14));
        CHECK(g.gap_sigma == 0.0);
        CHECK(g.gap_psi == 0.0);
    }

    auto psi = sequence_from_json(Json{{"kind", "psi_sin"}, {"base", base}, {"scale", 1.0}});
    for (int n : {1, 4}) {
        auto g = compact_convergence_gap(psi, n, probes);
        CHECK(g.gap_psi <= 1.0 / n + 1e-15);
        CHECK(g.gap_psi > 0.0);
    }
}

TEST_CASE("attainable set: interval box is swept and convex") {
    auto c = const_random_g(-1.0, 2.0, 1.0, 3.0, terminal_identity());
    auto w = const_path1(0.2, 1.0);

    auto sweep = [&](int res) {
        std::vector<P2> pts;
        auto grid = make_control_grid({res, res});
        for (std::size_t k = 0; k < grid.size(); ++k) {
            auto f = grid.point(k);
            double b = drift1(c, f, 0.3, w);
            double s = sigma1(c, f, 0.3, w);
            CHECK(b >= -1.0 - 1e-12);
            CHECK(b <= 2.0 + 1e-12);
            CHECK(s * s >= 1.0 - 1e-12);
            CHECK(s * s <= 3.0 + 1e-12);
            pts.push_back({b, s * s});
        }
        return pts;
    };

    double r_coarse = hull_covering_radius(sweep(6), 99);
    double r_fine = hull_covering_radius(sweep(21), 99);
    CHECK(r_fine < r_coarse);
    CHECK(r_fine < 0.2);
}

TEST_CASE("builtin family library passes the validators") {
    for (const char* name : {"drift_const", "vol_state_affine", "drift_running_max", "vol_delayed"}) {
        CAPTURE(name);
        auto c = make_builtin_field(name);
        auto probes = make_probe_set(13, 48, 2.0, c.horizon_T, 8, c.action_dim);
        CHECK(validate_nonanticipativity(c, probes).pass);
        CHECK(validate_growth(c, probes).pass);
        if (c.lipschitz_C >= 0.0) {
            auto pairs = make_probe_pairs(14, 48, 2.0, c.horizon_T, 8, c.action_dim);
            CHECK(validate_path_lipschitz(c, pairs) <= std::max(c.lipschitz_C, 1e-9) + 1e-9);
        }
    }
    CHECK_THROWS_AS(make_builtin_field("nope"), ValidationError);
}

TEST_CASE("terminal_peek family is rejected by the validator") {
    Json fam = {{"family", "random_g"},
                {"params",
                 {{"b_lo", {{"kind", "terminal_peek"}, {"c0", 0.0}, {"c1", 0.25}, {"clip_lo", -0.5}, {"clip_hi", 0.5}}},
                  {"b_hi", {{"kind", "constant"}, {"value", 1.0}}},
                  {"a_lo", {{"kind", "constant"}, {"value", 1.0}}},
                  {"a_hi", {{"kind", "constant"}, {"value", 1.0}}},
                  {"bound_C", 2.0},
                  {"horizon_T", 1.0},
                  {"terminal", {{"kind", "identity"}}}}}};
    auto c = field_from_json(fam);
    auto probes = make_probe_set(15, 64, 2.0, 1.0, 8, 2);
    auto rep = validate_nonanticipativity(c, probes);
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_discrepancy > 0.0);
}
