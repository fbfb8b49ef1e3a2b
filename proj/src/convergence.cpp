#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "pathhjb/convergence.hpp"
#include "pathhjb/errors.hpp"
#include "pathhjb/parallel.hpp"
#include "pathhjb/rng.hpp"

namespace pathhjb {

CompactTestSet make_builtin_test_set(std::uint64_t seed, std::size_t count, double R,
                                     double T) {
    CompactTestSet set;
    set.bound_R = R;
    set.horizon_T = T;
    set.points.reserve(count);

    const double times[] = {0.0, 0.25 * T, 0.5 * T, 0.75 * T};

    for (std::size_t i = 0; i < count; ++i) {
        RngStream rng(seed, i);
        TimedPath tp;
        if (i == 0) {
            double zero = 0.0;
            tp.t = 0.0;
            tp.path = make_constant_path(std::span<const double>(&zero, 1), T);
        } else if (i % 3 == 1) { // constant path
            double cval = rng.uniform(-R / 2, R / 2);
            tp.t = times[i % 4];
            tp.path = make_constant_path(std::span<const double>(&cval, 1), T);
        } else if (i % 3 == 2) { // scaled hat
            double h = rng.uniform(-R, R);
            tp.path = make_path1({0.0, T / 2, T}, {0.0, h, 0.0});
            tp.t = times[i % 4];
        } else { // clamped random walk on an 8-knot grid
            SampledPath w;
            w.dim = 1;
            double x = rng.uniform(-R / 2, R / 2);
            for (int k = 0; k <= 8; ++k) {
                w.grid.push_back(T * k / 8.0);
                w.values.push_back(x);
                x = std::clamp(x + rng.uniform(-R / 3, R / 3), -R, R);
            }
            tp.path = std::move(w);
            tp.t = times[i % 4];
        }
        set.points.push_back(std::move(tp));
    }
    return set;
}

StabilityReport run_stability(const CoefficientSequence& seq,
                              const CompactTestSet& test_set, const SolverConfig& cfg,
                              std::span<const int> n_values,
                              const StabilityValidationSpec& validation,
                              unsigned threads) {
    if (test_set.points.empty()) throw ValidationError("stability: empty test set");
    for (const auto& p : test_set.points) validate_timed_path(p);

    // Member validation happens before any solve: every member (including the
    // limit) must satisfy the shared linear growth bound and the uniform
    // terminal bound on the probe family.
    auto probes = make_probe_set(validation.probe_seed, validation.probe_count,
                                 validation.probe_R, test_set.horizon_T, 8, 2);
    std::vector<int> members(n_values.begin(), n_values.end());
    members.push_back(0);
    for (int n : members) {
        CoefficientField member = seq.at(n);
        if (validation.shared_growth_C > 0.0) {
            auto rep = validate_growth_against(member, validation.shared_growth_C, probes, threads);
            if (!rep.pass)
                throw ValidationError(
                    "stability refusal: member " + std::to_string(n) +
                    " violates the shared linear growth bound (uniform-in-n coefficient "
                    "growth); probe estimate " +
                    std::to_string(rep.estimate) + " > " +
                    std::to_string(validation.shared_growth_C));
        }
        if (validation.psi_bound_C > 0.0) {
            for (const auto& pr : probes) {
                double v = member.terminal(pr.omega);
                if (std::abs(v) > validation.psi_bound_C + 1e-12)
                    throw ValidationError(
                        "stability refusal: member " + std::to_string(n) +
                        " violates the uniform terminal bound (|psi| <= C for all members); "
                        "probe value " +
                        std::to_string(v));
            }
        }
    }

    StabilityReport rep;
    rep.n_values.assign(n_values.begin(), n_values.end());
    rep.solver_description = to_string(cfg.mode) + " steps=" + std::to_string(cfg.steps);

    auto solve_member = [&](const CoefficientField& member, const SolverConfig& base,
                            std::vector<double>& out) {
        out.resize(test_set.points.size());
        std::vector<SolverConfig> cfgs(test_set.points.size(), base);
        parallel_for(test_set.points.size(), threads, [&](std::size_t i) {
            cfgs[i].start = test_set.points[i];
            out[i] = solve(member, cfgs[i], 1).value;
        });
    };

    CoefficientField limit = seq.at(0);
    solve_member(limit, cfg, rep.limit_values);

    rep.values.resize(rep.n_values.size());
    rep.runtime_ms.resize(rep.n_values.size());
    for (std::size_t k = 0; k < rep.n_values.size(); ++k) {
        auto t0 = std::chrono::steady_clock::now();
        CoefficientField member = seq.at(rep.n_values[k]);
        solve_member(member, cfg, rep.values[k]);
        double gap = 0.0;
        for (std::size_t i = 0; i < test_set.points.size(); ++i)
            gap = std::max(gap, std::abs(rep.values[k][i] - rep.limit_values[i]));
        rep.gaps.push_back(gap);
        rep.runtime_ms[k] =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
    }

    // Discretization floor: the limit member re-solved at doubled resolution.
    SolverConfig fine = cfg;
    fine.steps = 2 * cfg.steps;
    std::vector<double> fine_values;
    solve_member(limit, fine, fine_values);
    for (std::size_t i = 0; i < test_set.points.size(); ++i)
        rep.floor_estimate =
            std::max(rep.floor_estimate, std::abs(fine_values[i] - rep.limit_values[i]));

    return rep;
}

double lipschitz_budget(const CoefficientField& c, std::string* formula) {
    double L_psi = c.terminal_lipschitz_C > 0.0 ? c.terminal_lipschitz_C : 1.0;
    double C = std::max(c.growth_C, c.lipschitz_C > 0.0 ? c.lipschitz_C : 0.0);
    double T = c.horizon_T;
    double budget = L_psi * (1.0 + 2.0 * C * std::sqrt(T + 1.0)) *
                    std::exp((2.0 * C + C * C) * T);
    if (formula) {
        *formula = "L_psi*(1 + 2*C*sqrt(T+1))*exp((2*C + C^2)*T) with L_psi=" +
                   std::to_string(L_psi) + ", C=max(growth_C, lipschitz_C)=" +
                   std::to_string(C) + ", T=" + std::to_string(T);
    }
    return budget;
}

LipschitzReport run_lipschitz(const CoefficientField& c, const PairSamplerSpec& sampler,
                              const SolverConfig& cfg, unsigned threads) {
    const double T = c.horizon_T;
    LipschitzReport rep;
    rep.metric_T = T;
    rep.l_budget = lipschitz_budget(c, &rep.l_budget_formula);

    // Pair variants cycle: time shift only, path perturbation only, both.
    auto base_set = make_builtin_test_set(sampler.seed, sampler.count, sampler.R, T);
    std::vector<std::pair<TimedPath, TimedPath>> pairs;
    pairs.reserve(sampler.count);
    for (std::size_t i = 0; i < sampler.count; ++i) {
        RngStream rng(sampler.seed ^ 0xabcdULL, i);
        TimedPath a = base_set.points[i % base_set.points.size()];
        TimedPath b = a;
        switch (i % 3) {
            case 0: // different current time
                b.t = std::clamp(a.t + rng.uniform(0.05, 0.4) * T, 0.0, T);
                break;
            case 1: { // perturbed path, same time
                for (auto& v : b.path.values)
                    v = std::clamp(v + rng.uniform(-0.5, 0.5), -sampler.R, sampler.R);
                break;
            }
            default: // both
                b.t = std::clamp(a.t + rng.uniform(-0.4, 0.4) * T, 0.0, T);
                for (auto& v : b.path.values)
                    v = std::clamp(v + rng.uniform(-0.5, 0.5), -sampler.R, sampler.R);
                break;
        }
        pairs.emplace_back(std::move(a), std::move(b));
    }

    std::vector<LipschitzPair> results(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t i) {
        LipschitzPair lp;
        lp.a = pairs[i].first;
        lp.b = pairs[i].second;
        lp.distance = metric_d(lp.a, lp.b, T);
        if (lp.distance > 1e-9) {
            SolverConfig ca = cfg, cb = cfg;
            ca.start = lp.a;
            cb.start = lp.b;
            lp.value_a = solve(c, ca, 1).value;
            lp.value_b = solve(c, cb, 1).value;
            lp.ratio = std::abs(lp.value_a - lp.value_b) / lp.distance;
        }
        results[i] = std::move(lp);
    });

    for (auto& lp : results) {
        if (lp.distance <= 1e-9) {
            ++rep.skipped;
            continue;
        }
        rep.max_ratio = std::max(rep.max_ratio, lp.ratio);
        rep.pairs.push_back(std::move(lp));
    }
    return rep;
}

} // namespace pathhjb
