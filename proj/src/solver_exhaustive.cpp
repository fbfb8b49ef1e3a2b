#include <chrono>
#include <cstdio>
#include <cmath>
#include <limits>

#include "pathhjb/errors.hpp"
#include "pathhjb/solver.hpp"

namespace pathhjb {

// Enumerates every feedback strategy: an assignment of one control grid point
// to each shock-history node (level k has Q^k of them, Q = quadrature size).
// For a fixed assignment the controlled path is a function of the shock
// history alone, so the expected payoff is an exact finite sum over the Q^N
// leaves. The maximum over assignments is the adapted value; agreement with
// the backward recursion of solve_tree is the dynamic-programming identity
// this oracle exists to check.

namespace {

struct Enumerator {
    const CoefficientField& c;
    const SolverConfig& cfg;
    std::vector<ControlPoint> controls;
    double t0, dt, sqrt_dt;
    std::vector<std::size_t> level_offset; // node id of the first node per level
    std::vector<std::size_t> assignment;   // control index per shock-history node

    double first_leaf_payoff = 0.0;
    bool have_first_leaf = false;
    double accum = 0.0;

    // Walks the shock tree under the current assignment. `hist` is the base-Q
    // shock-history index of the node at `level`.
    void walk(const SampledPath& path, int level, std::size_t hist, double prob) {
        if (level == cfg.steps) {
            double payoff = c.terminal(path);
            if (!have_first_leaf) {
                first_leaf_payoff = payoff;
                have_first_leaf = true;
            }
            accum += prob * (payoff - first_leaf_payoff);
            return;
        }
        const std::size_t d = static_cast<std::size_t>(c.dim_d);
        const std::size_t r = static_cast<std::size_t>(c.dim_r);
        const double t = t0 + level * dt;
        const ControlPoint& f = controls[assignment[level_offset[static_cast<std::size_t>(level)] + hist]];

        std::vector<double> b(d), s(d * r), xnext(d);
        c.drift(f, t, path, b.data());
        c.diffusion(f, t, path, s.data());
        std::span<const double> x = path.knot_value(path.knots() - 1);
        for (std::size_t j = 0; j < cfg.quad.size(); ++j) {
            auto xi = cfg.quad.node(j);
            for (std::size_t i = 0; i < d; ++i) {
                double diff = 0.0;
                for (std::size_t l = 0; l < r; ++l) diff += s[i * r + l] * xi[l];
                xnext[i] = x[i] + b[i] * dt + sqrt_dt * diff;
            }
            SampledPath child = append_knot(path, t0 + (level + 1) * dt, xnext);
            walk(child, level + 1, hist * cfg.quad.size() + j, prob * cfg.quad.weights[j]);
        }
    }
};

} // namespace

ValueEstimate solve_exhaustive(const CoefficientField& c, const SolverConfig& cfg) {
    auto start_clock = std::chrono::steady_clock::now();
    if (cfg.mode != SolverMode::exhaustive)
        throw ValidationError("solve_exhaustive: config mode is not 'exhaustive'");
    validate_solver_config(cfg, c);

    Enumerator en{c, cfg, {}, cfg.start.t, 0.0, 0.0, {}, {}};
    en.dt = (c.horizon_T - cfg.start.t) / cfg.steps;
    if (!(en.dt > 0.0)) throw ValidationError("solver: empty time interval to solve on");
    en.sqrt_dt = std::sqrt(en.dt);
    ControlGrid grid = make_control_grid(cfg.control_res);
    for (std::size_t k = 0; k < grid.size(); ++k) en.controls.push_back(grid.point(k));

    const std::size_t Q = cfg.quad.size();
    const std::size_t G = en.controls.size();
    std::size_t decision_nodes = 0, level_size = 1;
    en.level_offset.resize(static_cast<std::size_t>(cfg.steps));
    for (int k = 0; k < cfg.steps; ++k) {
        en.level_offset[static_cast<std::size_t>(k)] = decision_nodes;
        decision_nodes += level_size;
        level_size *= Q;
    }
    double n_strategies = std::pow(static_cast<double>(G), static_cast<double>(decision_nodes));
    if (n_strategies > cfg.budget_strategies) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "solve_exhaustive: %.3g strategies exceed the enumeration budget of %.3g",
                      n_strategies, cfg.budget_strategies);
        throw BudgetError(msg);
    }

    SampledPath root = dp_prefix(cfg.start.path, cfg.start.t);
    en.assignment.assign(decision_nodes, 0);

    ValueEstimate est;
    est.mode = SolverMode::exhaustive;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_root = 0;
    std::uint64_t strategies = 0;
    while (true) {
        en.have_first_leaf = false;
        en.accum = 0.0;
        en.walk(root, 0, 0, 1.0);
        double value = en.first_leaf_payoff + en.accum;
        if (value > best) {
            best = value;
            best_root = en.assignment[0];
        }
        ++strategies;
        // mixed-radix increment over the assignment vector
        std::size_t pos = 0;
        while (pos < decision_nodes) {
            if (++en.assignment[pos] < G) break;
            en.assignment[pos] = 0;
            ++pos;
        }
        if (pos == decision_nodes) break;
    }

    est.value = best;
    est.nodes = strategies;
    est.root_control = en.controls[best_root];
    est.policy_summary = std::to_string(strategies) + " strategies enumerated";
    est.runtime_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start_clock)
                         .count();
    return est;
}

} // namespace pathhjb
