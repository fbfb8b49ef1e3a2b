#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "pathhjb/errors.hpp"
#include "pathhjb/kernels.hpp"
#include "pathhjb/solver.hpp"

namespace pathhjb {

// Recombining lattice for d = r = 1 Markovian fields. Layers live on a
// uniform state grid. Three transition flavors:
//   terminal step  : psi evaluated exactly at the Euler children
//   interior steps : moment-matched three-point projection (kernel sweep)
//   start step     : children of the actual (possibly off-grid) start state
// With steps == 1 the start step is also the terminal one and the result
// reduces to the same one-step expectation solve_tree computes.

namespace {

double proj3_scalar(const double* v, std::size_t n, double lo, double hi, double dx,
                    double c) {
    c = std::min(std::max(c, lo), hi);
    double pos = (c - lo) / dx;
    double kf = std::nearbyint(pos);
    kf = std::min(std::max(kf, 1.0), static_cast<double>(n - 2));
    std::size_t k = static_cast<std::size_t>(kf);
    double delta = (c - lo) - kf * dx;
    double inv2 = 1.0 / (2.0 * dx * dx);
    double qm = delta * (delta - dx) * inv2;
    double qp = delta * (delta + dx) * inv2;
    return v[k] + (qm * (v[k - 1] - v[k]) + qp * (v[k + 1] - v[k]));
}

} // namespace

ValueEstimate solve_markovian(const CoefficientField& c, const SolverConfig& cfg) {
    auto start_clock = std::chrono::steady_clock::now();
    if (cfg.mode != SolverMode::markovian)
        throw ValidationError("solve_markovian: config mode is not 'markovian'");
    if (!c.markovian)
        throw ValidationError("solve_markovian: field is not declared Markovian");
    if (!c.terminal_state)
        throw ValidationError("solve_markovian: terminal functional does not factor through the final state");
    if (c.dim_d != 1 || c.dim_r != 1)
        throw ValidationError("solve_markovian: only d = r = 1 instances are supported");
    validate_solver_config(cfg, c);

    const double t0 = cfg.start.t;
    const double T = c.horizon_T;
    const int N = cfg.steps;
    const double dt = (T - t0) / N;
    if (!(dt > 0.0)) throw ValidationError("solver: empty time interval to solve on");
    const double sqrt_dt = std::sqrt(dt);

    const StateGridSpec& gs = cfg.state_grid;
    const std::size_t n = gs.states();
    if (n < 3) throw ValidationError("solve_markovian: state grid needs at least 3 states");
    const double grid_hi = gs.lo + static_cast<double>(n - 1) * gs.dx;

    ControlGrid grid = make_control_grid(cfg.control_res);
    std::vector<ControlPoint> controls;
    for (std::size_t k = 0; k < grid.size(); ++k) controls.push_back(grid.point(k));
    const std::size_t nq = cfg.quad.size();
    const auto& ops = kernels::active_ops();

    const double x0 = eval_path1(cfg.start.path, t0);
    SampledPath probe = make_constant_path(std::span<const double>(&x0, 1), 0.0);
    auto b_at = [&](const ControlPoint& f, double t, double x) {
        probe.values[0] = x;
        double out;
        c.drift(f, t, probe, &out);
        return out;
    };
    auto s_at = [&](const ControlPoint& f, double t, double x) {
        probe.values[0] = x;
        double out;
        c.diffusion(f, t, probe, &out);
        return out;
    };

    // One-step expectation from an explicit state with exact psi children.
    auto exact_step = [&](double x, double t, const SampledPath& w, std::size_t* argmax) {
        double best = -std::numeric_limits<double>::infinity();
        std::vector<double> vals(nq);
        double b_out, s_out;
        for (std::size_t fi = 0; fi < controls.size(); ++fi) {
            c.drift(controls[fi], t, w, &b_out);
            c.diffusion(controls[fi], t, w, &s_out);
            for (std::size_t j = 0; j < nq; ++j) {
                double child = x + b_out * dt + sqrt_dt * (s_out * cfg.quad.node(j)[0]);
                vals[j] = c.terminal_state(child);
            }
            double v = anchored_average(vals, cfg.quad.weights);
            if (v > best) {
                best = v;
                if (argmax) *argmax = fi;
            }
        }
        return best;
    };

    ValueEstimate est;
    est.mode = SolverMode::markovian;
    std::size_t root_argmax = 0;

    if (N == 1) {
        est.value = exact_step(x0, t0, cfg.start.path, &root_argmax);
        est.nodes = controls.size() * nq;
        est.root_control = controls[root_argmax];
        est.runtime_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start_clock)
                             .count();
        return est;
    }

    std::vector<double> v_next(n), v_cur(n), cand(n);
    std::vector<double> b_arr(n), a_arr(n);

    // layer N-1 from exact terminal children
    {
        const double t = t0 + (N - 1) * dt;
        std::vector<double> vals(nq);
        std::fill(v_next.begin(), v_next.end(), -std::numeric_limits<double>::infinity());
        for (std::size_t fi = 0; fi < controls.size(); ++fi) {
            for (std::size_t i = 0; i < n; ++i) {
                double x = gs.state(i);
                double b = b_at(controls[fi], t, x);
                double s = s_at(controls[fi], t, x);
                for (std::size_t j = 0; j < nq; ++j) {
                    double child = x + b * dt + sqrt_dt * (s * cfg.quad.node(j)[0]);
                    vals[j] = c.terminal_state(child);
                }
                double v = anchored_average(vals, cfg.quad.weights);
                if (v > v_next[i]) v_next[i] = v;
            }
        }
    }

    // interior layers N-2 .. 1 via the kernel sweep
    for (int k = N - 2; k >= 1; --k) {
        const double t = t0 + k * dt;
        std::fill(v_cur.begin(), v_cur.end(), -std::numeric_limits<double>::infinity());
        for (std::size_t fi = 0; fi < controls.size(); ++fi) {
            for (std::size_t i = 0; i < n; ++i) {
                double x = gs.state(i);
                b_arr[i] = b_at(controls[fi], t, x);
                double s = s_at(controls[fi], t, x);
                a_arr[i] = s * s;
            }
            ops.lattice_step(v_next.data(), n, gs.lo, gs.dx, b_arr.data(), a_arr.data(),
                             dt, cfg.quad.nodes.data(), cfg.quad.weights.data(), nq,
                             cand.data());
            ops.max_accumulate(v_cur.data(), cand.data(), n);
        }
        std::swap(v_cur, v_next);
    }

    // start step from the true start path (off-grid states allowed)
    {
        double best = -std::numeric_limits<double>::infinity();
        std::vector<double> vals(nq);
        double b_out, s_out;
        for (std::size_t fi = 0; fi < controls.size(); ++fi) {
            c.drift(controls[fi], t0, cfg.start.path, &b_out);
            c.diffusion(controls[fi], t0, cfg.start.path, &s_out);
            for (std::size_t j = 0; j < nq; ++j) {
                double child = x0 + b_out * dt + sqrt_dt * (s_out * cfg.quad.node(j)[0]);
                vals[j] = proj3_scalar(v_next.data(), n, gs.lo, grid_hi, gs.dx, child);
            }
            double v = anchored_average(vals, cfg.quad.weights);
            if (v > best) {
                best = v;
                root_argmax = fi;
            }
        }
        est.value = best;
    }

    est.nodes = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(N) *
                controls.size();
    est.root_control = controls[root_argmax];
    est.policy_summary = "kernel=" + std::string(ops.name);
    est.runtime_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start_clock)
                         .count();
    return est;
}

} // namespace pathhjb
