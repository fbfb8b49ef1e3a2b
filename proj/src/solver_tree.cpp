#include <chrono>
#include <cstdio>
#include <cmath>
#include <limits>

#include "pathhjb/errors.hpp"
#include "pathhjb/parallel.hpp"
#include "pathhjb/solver.hpp"

namespace pathhjb {

std::string to_string(SolverMode m) {
    switch (m) {
        case SolverMode::tree: return "tree";
        case SolverMode::markovian: return "markovian";
        case SolverMode::montecarlo: return "montecarlo";
        case SolverMode::exhaustive: return "exhaustive";
    }
    return "?";
}

SolverMode solver_mode_from_string(const std::string& s) {
    if (s == "tree") return SolverMode::tree;
    if (s == "markovian") return SolverMode::markovian;
    if (s == "montecarlo") return SolverMode::montecarlo;
    if (s == "exhaustive") return SolverMode::exhaustive;
    throw ValidationError("solver: unknown mode '" + s + "'");
}

std::size_t StateGridSpec::states() const {
    if (!(hi > lo) || !(dx > 0.0)) throw ValidationError("state grid: need hi > lo and dx > 0");
    return static_cast<std::size_t>(std::floor((hi - lo) / dx + 0.5)) + 1;
}

void validate_solver_config(const SolverConfig& cfg, const CoefficientField& c) {
    if (cfg.steps < 1) throw ValidationError("solver: steps must be >= 1");
    validate_quadrature(cfg.quad);
    if (cfg.quad.r != c.dim_r) throw ValidationError("solver: quadrature dimension != field shock dimension");
    if (static_cast<int>(cfg.control_res.size()) != c.action_dim)
        throw ValidationError("solver: control_res length != action dimension");
    for (int r : cfg.control_res)
        if (r < 1) throw ValidationError("solver: control resolutions must be >= 1");
    validate_timed_path(cfg.start);
    if (cfg.start.path.dim != c.dim_d) throw ValidationError("solver: start path dimension != field dimension");
    if (cfg.start.t > c.horizon_T + kKnotMergeTol)
        throw ValidationError("solver: start time beyond the field horizon");
}

SampledPath dp_prefix(const SampledPath& p, double t) {
    SampledPath r;
    r.dim = p.dim;
    for (std::size_t k = 0; k < p.knots() && p.grid[k] < t - kKnotMergeTol; ++k) {
        r.grid.push_back(p.grid[k]);
        auto v = p.knot_value(k);
        r.values.insert(r.values.end(), v.begin(), v.end());
    }
    std::vector<double> vt(static_cast<std::size_t>(p.dim));
    eval_path(p, t, vt);
    if (r.grid.empty()) {
        r.grid.push_back(0.0); // t is at (or within tolerance of) the origin
        r.values.insert(r.values.end(), vt.begin(), vt.end());
    } else if (t > r.grid.back() + kKnotMergeTol) {
        r.grid.push_back(t);
        r.values.insert(r.values.end(), vt.begin(), vt.end());
    }
    return r;
}

double anchored_average(std::span<const double> values, std::span<const double> weights) {
    double first = values[0];
    double corr = 0.0;
    for (std::size_t j = 1; j < values.size(); ++j) corr += weights[j] * (values[j] - first);
    return first + corr;
}

namespace {

struct TreeContext {
    const CoefficientField& c;
    const SolverConfig& cfg;
    ControlGrid grid;
    double t0;
    double dt;
    double sqrt_dt;
    std::vector<ControlPoint> controls; // enumerated once, lexicographic
};

TreeContext make_context(const CoefficientField& c, const SolverConfig& cfg) {
    TreeContext ctx{c, cfg, make_control_grid(cfg.control_res), cfg.start.t, 0.0, 0.0, {}};
    ctx.dt = (c.horizon_T - cfg.start.t) / cfg.steps;
    if (!(ctx.dt > 0.0)) throw ValidationError("solver: empty time interval to solve on");
    ctx.sqrt_dt = std::sqrt(ctx.dt);
    ctx.controls.reserve(ctx.grid.size());
    for (std::size_t k = 0; k < ctx.grid.size(); ++k) ctx.controls.push_back(ctx.grid.point(k));
    return ctx;
}

double tree_node_visits(std::size_t branching, int steps) {
    double total = 0.0, level = 1.0;
    for (int k = 1; k <= steps; ++k) {
        level *= static_cast<double>(branching);
        total += level;
    }
    return total;
}

[[noreturn]] void numeric_failure(int level, double t, std::span<const double> state) {
    std::string msg = "solver: coefficient produced a non-finite value at step " +
                      std::to_string(level) + ", t=" + std::to_string(t) + ", state=(";
    for (std::size_t i = 0; i < state.size(); ++i)
        msg += (i ? "," : "") + std::to_string(state[i]);
    throw std::runtime_error(msg + ")");
}

// One Euler child state: x + b dt + sqrt(dt) * (sigma xi).
void child_state(const TreeContext& ctx, std::span<const double> x,
                 std::span<const double> b, std::span<const double> s,
                 std::span<const double> xi, std::span<double> out) {
    const std::size_t d = static_cast<std::size_t>(ctx.c.dim_d);
    const std::size_t r = static_cast<std::size_t>(ctx.c.dim_r);
    for (std::size_t i = 0; i < d; ++i) {
        double diff = 0.0;
        for (std::size_t l = 0; l < r; ++l) diff += s[i * r + l] * xi[l];
        out[i] = x[i] + b[i] * ctx.dt + ctx.sqrt_dt * diff;
    }
}

struct DfsResult {
    double value;
    std::size_t argmax_flat;
};

DfsResult dp_value(const TreeContext& ctx, const SampledPath& path, int level,
                   std::uint64_t& visits) {
    if (level == ctx.cfg.steps) return {ctx.c.terminal(path), 0};

    const std::size_t d = static_cast<std::size_t>(ctx.c.dim_d);
    const std::size_t r = static_cast<std::size_t>(ctx.c.dim_r);
    const double t = ctx.t0 + level * ctx.dt;
    const double t_next = ctx.t0 + (level + 1) * ctx.dt;
    std::span<const double> x = path.knot_value(path.knots() - 1);

    std::vector<double> b(d), s(d * r), xnext(d);
    std::vector<double> child_values(ctx.cfg.quad.size());

    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_flat = 0;
    for (std::size_t fi = 0; fi < ctx.controls.size(); ++fi) {
        const ControlPoint& f = ctx.controls[fi];
        ctx.c.drift(f, t, path, b.data());
        ctx.c.diffusion(f, t, path, s.data());
        for (double v : b)
            if (!std::isfinite(v)) numeric_failure(level, t, x);
        for (double v : s)
            if (!std::isfinite(v)) numeric_failure(level, t, x);

        for (std::size_t j = 0; j < ctx.cfg.quad.size(); ++j) {
            child_state(ctx, x, b, s, ctx.cfg.quad.node(j), xnext);
            ++visits;
            SampledPath child = append_knot(path, t_next, xnext);
            child_values[j] = dp_value(ctx, child, level + 1, visits).value;
        }
        double v = anchored_average(child_values, ctx.cfg.quad.weights);
        if (v > best) {
            best = v;
            best_flat = fi;
        }
    }
    return {best, best_flat};
}

} // namespace

ValueEstimate solve_tree(const CoefficientField& c, const SolverConfig& cfg,
                         unsigned threads) {
    auto start_clock = std::chrono::steady_clock::now();
    if (cfg.mode != SolverMode::tree) throw ValidationError("solve_tree: config mode is not 'tree'");
    validate_solver_config(cfg, c);
    TreeContext ctx = make_context(c, cfg);

    const std::size_t branching = ctx.controls.size() * cfg.quad.size();
    double visits_needed = tree_node_visits(branching, cfg.steps);
    if (visits_needed > cfg.budget_tree_nodes) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "solve_tree: instance needs about %.3g node visits, budget is %.3g",
                      visits_needed, cfg.budget_tree_nodes);
        throw BudgetError(msg);
    }

    SampledPath root = dp_prefix(cfg.start.path, cfg.start.t);

    // Parallelize over the root's (control, shock) children; the final max
    // and averages run sequentially in enumeration order.
    const std::size_t d = static_cast<std::size_t>(c.dim_d);
    const std::size_t r = static_cast<std::size_t>(c.dim_r);
    const std::size_t nq = cfg.quad.size();
    std::span<const double> x0 = root.knot_value(root.knots() - 1);

    ValueEstimate est;
    est.mode = SolverMode::tree;

    struct Job {
        SampledPath child;
        double value = 0.0;
        std::uint64_t visits = 0;
    };
    std::vector<Job> jobs(ctx.controls.size() * nq);
    {
        std::vector<double> b(d), s(d * r), xnext(d);
        const double t_next = ctx.t0 + ctx.dt;
        for (std::size_t fi = 0; fi < ctx.controls.size(); ++fi) {
            c.drift(ctx.controls[fi], ctx.t0, root, b.data());
            c.diffusion(ctx.controls[fi], ctx.t0, root, s.data());
            for (double v : b)
                if (!std::isfinite(v)) numeric_failure(0, ctx.t0, x0);
            for (double v : s)
                if (!std::isfinite(v)) numeric_failure(0, ctx.t0, x0);
            for (std::size_t j = 0; j < nq; ++j) {
                child_state(ctx, x0, b, s, cfg.quad.node(j), xnext);
                jobs[fi * nq + j].child = append_knot(root, t_next, xnext);
            }
        }
    }
    parallel_for(jobs.size(), threads, [&](std::size_t i) {
        ++jobs[i].visits;
        jobs[i].value = dp_value(ctx, jobs[i].child, 1, jobs[i].visits).value;
    });

    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_flat = 0;
    std::vector<double> child_values(nq);
    std::uint64_t visits = 0;
    for (std::size_t fi = 0; fi < ctx.controls.size(); ++fi) {
        for (std::size_t j = 0; j < nq; ++j) {
            child_values[j] = jobs[fi * nq + j].value;
            visits += jobs[fi * nq + j].visits;
        }
        double v = anchored_average(child_values, cfg.quad.weights);
        if (v > best) {
            best = v;
            best_flat = fi;
        }
    }

    est.value = best;
    est.nodes = visits;
    est.root_control = ctx.controls[best_flat];
    est.policy_summary = "root argmax control index " + std::to_string(best_flat);
    est.runtime_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start_clock)
                         .count();
    return est;
}

ValueTree solve_tree_full(const CoefficientField& c, const SolverConfig& cfg) {
    if (cfg.mode != SolverMode::tree) throw ValidationError("solve_tree_full: config mode is not 'tree'");
    validate_solver_config(cfg, c);
    TreeContext ctx = make_context(c, cfg);
    const std::size_t branching = ctx.controls.size() * cfg.quad.size();
    double visits_needed = tree_node_visits(branching, cfg.steps);
    if (visits_needed > 1e6)
        throw BudgetError("solve_tree_full: materialized tree too large");

    ValueTree tree;
    tree.branching = branching;
    tree.levels.resize(static_cast<std::size_t>(cfg.steps) + 1);
    tree.levels[0].push_back({dp_prefix(cfg.start.path, cfg.start.t), 0.0, {}});

    const std::size_t d = static_cast<std::size_t>(c.dim_d);
    const std::size_t r = static_cast<std::size_t>(c.dim_r);
    std::vector<double> b(d), s(d * r), xnext(d);

    // forward expansion
    for (int level = 0; level < cfg.steps; ++level) {
        auto& cur = tree.levels[static_cast<std::size_t>(level)];
        auto& next = tree.levels[static_cast<std::size_t>(level) + 1];
        next.reserve(cur.size() * branching);
        const double t = ctx.t0 + level * ctx.dt;
        const double t_next = ctx.t0 + (level + 1) * ctx.dt;
        for (auto& node : cur) {
            std::span<const double> x = node.prefix.knot_value(node.prefix.knots() - 1);
            for (const auto& f : ctx.controls) {
                c.drift(f, t, node.prefix, b.data());
                c.diffusion(f, t, node.prefix, s.data());
                for (std::size_t j = 0; j < cfg.quad.size(); ++j) {
                    child_state(ctx, x, b, s, cfg.quad.node(j), xnext);
                    next.push_back({append_knot(node.prefix, t_next, xnext), 0.0, {}});
                }
            }
        }
    }
    // backward values
    auto& leaves = tree.levels.back();
    for (auto& leaf : leaves) leaf.value = c.terminal(leaf.prefix);
    std::vector<double> child_values(cfg.quad.size());
    for (int level = cfg.steps - 1; level >= 0; --level) {
        auto& cur = tree.levels[static_cast<std::size_t>(level)];
        auto& next = tree.levels[static_cast<std::size_t>(level) + 1];
        for (std::size_t ni = 0; ni < cur.size(); ++ni) {
            double best = -std::numeric_limits<double>::infinity();
            std::size_t best_f = 0;
            for (std::size_t fi = 0; fi < ctx.controls.size(); ++fi) {
                for (std::size_t j = 0; j < cfg.quad.size(); ++j)
                    child_values[j] = next[ni * branching + fi * cfg.quad.size() + j].value;
                double v = anchored_average(child_values, cfg.quad.weights);
                if (v > best) {
                    best = v;
                    best_f = fi;
                }
            }
            cur[ni].value = best;
            cur[ni].argmax = ctx.controls[best_f];
        }
    }
    return tree;
}

double recheck_value_tree(const CoefficientField& c, const SolverConfig& cfg,
                          const ValueTree& tree) {
    double defect = 0.0;
    const auto& leaves = tree.levels.back();
    for (const auto& leaf : leaves)
        defect = std::max(defect, std::abs(leaf.value - c.terminal(leaf.prefix)));
    std::vector<double> child_values(cfg.quad.size());
    for (std::size_t level = 0; level + 1 < tree.levels.size(); ++level) {
        const auto& cur = tree.levels[level];
        const auto& next = tree.levels[level + 1];
        const std::size_t n_controls = tree.branching / cfg.quad.size();
        for (std::size_t ni = 0; ni < cur.size(); ++ni) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t fi = 0; fi < n_controls; ++fi) {
                for (std::size_t j = 0; j < cfg.quad.size(); ++j)
                    child_values[j] = next[ni * tree.branching + fi * cfg.quad.size() + j].value;
                best = std::max(best, anchored_average(child_values, cfg.quad.weights));
            }
            defect = std::max(defect, std::abs(cur[ni].value - best));
        }
    }
    return defect;
}

ValueEstimate solve(const CoefficientField& c, const SolverConfig& cfg, unsigned threads) {
    if (c.horizon_T - cfg.start.t <= kKnotMergeTol) {
        // at the horizon the value is the terminal functional itself
        validate_timed_path(cfg.start);
        ValueEstimate est;
        est.mode = cfg.mode;
        est.value = c.terminal(stop(cfg.start.path, std::min(cfg.start.t, cfg.start.path.horizon())));
        return est;
    }
    switch (cfg.mode) {
        case SolverMode::tree: return solve_tree(c, cfg, threads);
        case SolverMode::markovian: return solve_markovian(c, cfg);
        case SolverMode::exhaustive: return solve_exhaustive(c, cfg);
        case SolverMode::montecarlo: {
            ControlGrid grid = make_control_grid(cfg.control_res);
            const double thresholds[] = {-1.0, 0.0, 1.0};
            auto policies = make_policy_class(grid, thresholds);
            return solve_montecarlo(c, cfg, policies, cfg.n_paths, cfg.seed, threads);
        }
    }
    throw ValidationError("solver: unknown mode");
}

} // namespace pathhjb
