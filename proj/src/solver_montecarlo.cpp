#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "pathhjb/errors.hpp"
#include "pathhjb/parallel.hpp"
#include "pathhjb/rng.hpp"
#include "pathhjb/solver.hpp"

namespace pathhjb {

std::vector<FeedbackPolicy> make_policy_class(const ControlGrid& grid,
                                              std::span<const double> thresholds) {
    std::vector<FeedbackPolicy> ps;
    std::vector<ControlPoint> points;
    for (std::size_t k = 0; k < grid.size(); ++k) points.push_back(grid.point(k));

    for (std::size_t k = 0; k < points.size(); ++k) {
        ps.push_back({"const_" + std::to_string(k),
                      [p = points[k]](int, double, std::span<const double>, double) { return p; }});
    }
    if (points.size() >= 2) {
        const ControlPoint lo = points.front();
        const ControlPoint hi = points.back();
        for (double th : thresholds) {
            ps.push_back({"state_threshold_" + std::to_string(th),
                          [lo, hi, th](int, double, std::span<const double> x, double) {
                              return x[0] <= th ? lo : hi;
                          }});
            ps.push_back({"runmax_threshold_" + std::to_string(th),
                          [lo, hi, th](int, double, std::span<const double>, double m) {
                              return m <= th ? lo : hi;
                          }});
        }
    }
    return ps;
}

namespace {

struct PolicyStats {
    double anchor = 0.0;    // payoff of path 0
    double sum_d = 0.0;     // sum of (payoff - anchor)
    double sum_d2 = 0.0;
};

} // namespace

ValueEstimate solve_montecarlo(const CoefficientField& c, const SolverConfig& cfg,
                               std::span<const FeedbackPolicy> policies, int n_paths,
                               std::uint64_t seed, unsigned threads) {
    auto start_clock = std::chrono::steady_clock::now();
    if (cfg.mode != SolverMode::montecarlo)
        throw ValidationError("solve_montecarlo: config mode is not 'montecarlo'");
    if (policies.empty()) throw ValidationError("solve_montecarlo: empty policy class");
    if (n_paths < 2) throw ValidationError("solve_montecarlo: need at least 2 paths");
    validate_solver_config(cfg, c);

    const double dt = (c.horizon_T - cfg.start.t) / cfg.steps;
    if (!(dt > 0.0)) throw ValidationError("solver: empty time interval to solve on");
    const double sqrt_dt = std::sqrt(dt);
    const std::size_t d = static_cast<std::size_t>(c.dim_d);
    const std::size_t r = static_cast<std::size_t>(c.dim_r);
    SampledPath root = dp_prefix(cfg.start.path, cfg.start.t);

    // Fixed-size path blocks, merged in block order: the estimate does not
    // depend on the worker count. Shocks are indexed by (path, step, axis)
    // only, so every policy sees the same draws (common random numbers).
    constexpr std::size_t kBlock = 512;
    const std::size_t n = static_cast<std::size_t>(n_paths);
    const std::size_t n_blocks = (n + kBlock - 1) / kBlock;

    std::vector<std::vector<PolicyStats>> block_stats(
        n_blocks, std::vector<PolicyStats>(policies.size()));
    std::vector<double> anchors(policies.size(), 0.0);

    // Anchor payoffs (path 0) are computed once up front so every block can
    // accumulate deviations from the same reference.
    auto simulate = [&](std::size_t pi, std::size_t path_idx) {
        const FeedbackPolicy& pol = policies[pi];
        SampledPath path = root;
        std::vector<double> b(d), s(d * r), xnext(d);
        double run_max = sup_norm(root, cfg.start.t);
        for (int k = 0; k < cfg.steps; ++k) {
            double t = cfg.start.t + k * dt;
            std::span<const double> x = path.knot_value(path.knots() - 1);
            ControlPoint f = pol.choose(k, t, x, run_max);
            c.drift(f, t, path, b.data());
            c.diffusion(f, t, path, s.data());
            for (std::size_t i = 0; i < d; ++i) {
                double diff = 0.0;
                for (std::size_t l = 0; l < r; ++l)
                    diff += s[i * r + l] * normal01(seed, path_idx, static_cast<std::uint64_t>(k), l);
                xnext[i] = x[i] + b[i] * dt + sqrt_dt * diff;
            }
            path = append_knot(path, cfg.start.t + (k + 1) * dt, xnext);
            double nx = 0.0;
            for (double v : xnext) nx += v * v;
            run_max = std::max(run_max, std::sqrt(nx));
        }
        return c.terminal(path);
    };

    for (std::size_t pi = 0; pi < policies.size(); ++pi) anchors[pi] = simulate(pi, 0);

    parallel_for(n_blocks, threads, [&](std::size_t blk) {
        std::size_t lo = blk * kBlock;
        std::size_t hi = std::min(n, lo + kBlock);
        for (std::size_t pi = 0; pi < policies.size(); ++pi) {
            PolicyStats st;
            st.anchor = anchors[pi];
            for (std::size_t i = lo; i < hi; ++i) {
                double payoff = (i == 0) ? anchors[pi] : simulate(pi, i);
                double dev = payoff - st.anchor;
                st.sum_d += dev;
                st.sum_d2 += dev * dev;
            }
            block_stats[blk][pi] = st;
        }
    });

    double best_mean = -std::numeric_limits<double>::infinity();
    double best_stderr = 0.0;
    std::size_t best_pi = 0;
    for (std::size_t pi = 0; pi < policies.size(); ++pi) {
        double sum_d = 0.0, sum_d2 = 0.0;
        for (std::size_t blk = 0; blk < n_blocks; ++blk) {
            sum_d += block_stats[blk][pi].sum_d;
            sum_d2 += block_stats[blk][pi].sum_d2;
        }
        double mean = anchors[pi] + sum_d / static_cast<double>(n);
        double var = (sum_d2 - sum_d * sum_d / static_cast<double>(n)) /
                     (static_cast<double>(n) - 1.0);
        var = std::max(var, 0.0);
        double se = std::sqrt(var / static_cast<double>(n));
        if (mean > best_mean) {
            best_mean = mean;
            best_stderr = se;
            best_pi = pi;
        }
    }

    ValueEstimate est;
    est.mode = SolverMode::montecarlo;
    est.value = best_mean;
    est.stderr_ = best_stderr;
    est.nodes = static_cast<std::uint64_t>(n) * policies.size();
    est.policy_summary = policies[best_pi].name;
    est.runtime_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start_clock)
                         .count();
    return est;
}

} // namespace pathhjb
