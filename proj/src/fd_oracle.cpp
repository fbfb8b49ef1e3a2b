#include <algorithm>
#include <cmath>

#include "pathhjb/convergence.hpp"
#include "pathhjb/errors.hpp"
#include "pathhjb/hamiltonian.hpp"
#include "pathhjb/kernels.hpp"

namespace pathhjb {

FdTable fd_oracle_markovian(const CoefficientField& c,
                            const std::function<double(double)>& psi_state,
                            const FdGridSpec& spec) {
    if (!c.markovian || c.dim_d != 1 || c.dim_r != 1)
        throw ValidationError("fd_oracle: needs a d = r = 1 Markovian field");
    if (!psi_state) throw ValidationError("fd_oracle: missing state terminal function");
    if (spec.control_res < 1) throw ValidationError("fd_oracle: control_res must be >= 1");

    const StateGridSpec& gs = spec.grid;
    const std::size_t n = gs.states();
    const double T = c.horizon_T;
    const auto& ops = kernels::active_ops();

    ControlGrid grid = make_control_grid(std::vector<int>(
        static_cast<std::size_t>(c.action_dim), spec.control_res));
    std::vector<ControlPoint> controls;
    for (std::size_t k = 0; k < grid.size(); ++k) controls.push_back(grid.point(k));

    SampledPath probe = make_constant_path(std::span<const double>(&gs.lo, 1), 0.0);
    auto coeffs_at = [&](const ControlPoint& f, double t, double x, double& b, double& a) {
        probe.values[0] = x;
        double s;
        c.drift(f, t, probe, &b);
        c.diffusion(f, t, probe, &s);
        a = s * s;
    };

    std::vector<double> w(n), w_next(n), gen(n), gmax(n);
    std::vector<double> b_arr(n), a_arr(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = psi_state(gs.state(i));

    FdTable table;
    table.grid = gs;

    // Thin the stored layers to roughly keep_layers, always keeping t = T and
    // t = 0. Collected in backward order, reversed at the end.
    std::vector<double> rev_times;
    std::vector<std::vector<double>> rev_layers;
    const double keep_stride = T / static_cast<double>(std::max<std::size_t>(spec.keep_layers - 1, 1));
    double next_keep = T;

    double t = T;
    while (t > 0.0) {
        if (t <= next_keep + 1e-12) {
            rev_times.push_back(t);
            rev_layers.push_back(w);
            next_keep = t - keep_stride;
        }
        // CFL bound from the current layer's coefficients
        double limit = 0.0;
        for (std::size_t fi = 0; fi < controls.size(); ++fi) {
            for (std::size_t i = 0; i < n; ++i) {
                double b, a;
                coeffs_at(controls[fi], t, gs.state(i), b, a);
                limit = std::max(limit, a / (gs.dx * gs.dx) + std::abs(b) / gs.dx);
            }
        }
        double dt_cfl = (limit > 0.0) ? spec.cfl_number / limit : spec.dt_target;
        double dt = std::min({spec.dt_target, dt_cfl, t});
        if (dt < spec.dt_target && dt < t) ++table.cfl_reductions;

        std::fill(gmax.begin(), gmax.end(), -std::numeric_limits<double>::infinity());
        for (std::size_t fi = 0; fi < controls.size(); ++fi) {
            for (std::size_t i = 0; i < n; ++i)
                coeffs_at(controls[fi], t, gs.state(i), b_arr[i], a_arr[i]);
            ops.upwind_generator(w.data(), n, gs.dx, b_arr.data(), a_arr.data(), gen.data());
            ops.max_accumulate(gmax.data(), gen.data(), n);
        }
        // backward Euler step in remaining time: w(t - dt) = w(t) + dt * gmax
        for (std::size_t i = 1; i + 1 < n; ++i) w_next[i] = w[i] + dt * gmax[i];
        // one-sided boundary copy (grid chosen wide enough that the boundary
        // layer stays away from the query region)
        w_next[0] = 2.0 * w_next[1] - w_next[2];
        w_next[n - 1] = 2.0 * w_next[n - 2] - w_next[n - 3];
        std::swap(w, w_next);
        t -= dt;
        ++table.steps_taken;
        if (table.steps_taken > 50'000'000ULL)
            throw BudgetError("fd_oracle: step budget exhausted; coarsen dt or the grid");
    }
    rev_times.push_back(0.0);
    rev_layers.push_back(w);

    table.times.assign(rev_times.rbegin(), rev_times.rend());
    table.layers.assign(rev_layers.rbegin(), rev_layers.rend());
    return table;
}

namespace {

double quad_interp_x(const std::vector<double>& layer, const StateGridSpec& gs, double x) {
    const std::size_t n = layer.size();
    double hi = gs.lo + static_cast<double>(n - 1) * gs.dx;
    x = std::min(std::max(x, gs.lo), hi);
    double pos = (x - gs.lo) / gs.dx;
    double kf = std::nearbyint(pos);
    kf = std::min(std::max(kf, 1.0), static_cast<double>(n - 2));
    std::size_t k = static_cast<std::size_t>(kf);
    double delta = (x - gs.lo) - kf * gs.dx;
    double inv2 = 1.0 / (2.0 * gs.dx * gs.dx);
    double qm = delta * (delta - gs.dx) * inv2;
    double qp = delta * (delta + gs.dx) * inv2;
    return layer[k] + (qm * (layer[k - 1] - layer[k]) + qp * (layer[k + 1] - layer[k]));
}

} // namespace

double fd_table_value(const FdTable& table, double t, double x) {
    const auto& ts = table.times;
    if (ts.empty()) throw ValidationError("fd_table_value: empty table");
    if (t <= ts.front()) return quad_interp_x(table.layers.front(), table.grid, x);
    if (t >= ts.back()) return quad_interp_x(table.layers.back(), table.grid, x);
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - ts.begin());
    std::size_t lo = hi - 1;
    double wl = (ts[hi] - t) / (ts[hi] - ts[lo]);
    return wl * quad_interp_x(table.layers[lo], table.grid, x) +
           (1.0 - wl) * quad_interp_x(table.layers[hi], table.grid, x);
}

ResidualStats residual_probe(const CoefficientField& c, const FdTable& table,
                             std::span<const std::pair<double, double>> probe_points,
                             int control_grid_res) {
    if (table.times.size() < 3)
        throw ValidationError("residual_probe: table needs at least 3 time layers");
    ResidualStats stats;
    for (auto [tp, xp] : probe_points) {
        // three consecutive kept layers around tp
        auto it = std::upper_bound(table.times.begin(), table.times.end(), tp);
        std::size_t mid = static_cast<std::size_t>(it - table.times.begin());
        mid = std::min(std::max<std::size_t>(mid, 1), table.times.size() - 2);
        const double t0 = table.times[mid - 1], t1 = table.times[mid], t2 = table.times[mid + 1];
        const auto* l0 = &table.layers[mid - 1];
        const auto* l1 = &table.layers[mid];
        const auto* l2 = &table.layers[mid + 1];
        const StateGridSpec gs = table.grid;

        // g(t, x): quadratic Lagrange basis in t over the three layers, each
        // layer interpolated quadratically in x.
        auto basis = [t0, t1, t2](double t, double* L, double* Lp) {
            double d01 = t0 - t1, d02 = t0 - t2, d12 = t1 - t2;
            L[0] = (t - t1) * (t - t2) / (d01 * d02);
            L[1] = (t - t0) * (t - t2) / (-d01 * d12);
            L[2] = (t - t0) * (t - t1) / (d02 * d12);
            Lp[0] = ((t - t1) + (t - t2)) / (d01 * d02);
            Lp[1] = ((t - t0) + (t - t2)) / (-d01 * d12);
            Lp[2] = ((t - t0) + (t - t1)) / (d02 * d12);
        };

        CylindricalTestFunction phi;
        phi.dim = 1;
        phi.anchor_times = {tp};
        phi.name = "fd_table_patch";
        phi.g = [=](double t, std::span<const double> x) {
            double L[3], Lp[3];
            basis(t, L, Lp);
            return L[0] * quad_interp_x(*l0, gs, x[0]) + L[1] * quad_interp_x(*l1, gs, x[0]) +
                   L[2] * quad_interp_x(*l2, gs, x[0]);
        };
        phi.g_t = [=](double t, std::span<const double> x) {
            double L[3], Lp[3];
            basis(t, L, Lp);
            return Lp[0] * quad_interp_x(*l0, gs, x[0]) + Lp[1] * quad_interp_x(*l1, gs, x[0]) +
                   Lp[2] * quad_interp_x(*l2, gs, x[0]);
        };
        auto space_deriv = [=](const std::vector<double>& layer, double x, int order) {
            const std::size_t n = layer.size();
            double hig = gs.lo + static_cast<double>(n - 1) * gs.dx;
            x = std::min(std::max(x, gs.lo), hig);
            double kf = std::nearbyint((x - gs.lo) / gs.dx);
            kf = std::min(std::max(kf, 1.0), static_cast<double>(n - 2));
            std::size_t k = static_cast<std::size_t>(kf);
            double delta = (x - gs.lo) - kf * gs.dx;
            if (order == 1)
                return (layer[k + 1] - layer[k - 1]) / (2.0 * gs.dx) +
                       delta * (layer[k + 1] - 2.0 * layer[k] + layer[k - 1]) / (gs.dx * gs.dx);
            return (layer[k + 1] - 2.0 * layer[k] + layer[k - 1]) / (gs.dx * gs.dx);
        };
        phi.g_grad = [=](double t, std::span<const double> x, double* out) {
            double L[3], Lp[3];
            basis(t, L, Lp);
            out[0] = L[0] * space_deriv(*l0, x[0], 1) + L[1] * space_deriv(*l1, x[0], 1) +
                     L[2] * space_deriv(*l2, x[0], 1);
        };
        phi.g_hess = [=](double t, std::span<const double> x, double* out) {
            double L[3], Lp[3];
            basis(t, L, Lp);
            out[0] = L[0] * space_deriv(*l0, x[0], 2) + L[1] * space_deriv(*l1, x[0], 2) +
                     L[2] * space_deriv(*l2, x[0], 2);
        };

        TimedPath at;
        at.t = tp;
        at.path = make_constant_path(std::span<const double>(&xp, 1), std::max(tp, c.horizon_T));
        double res = ppde_residual(c, phi, at, control_grid_res);
        stats.max_abs = std::max(stats.max_abs, std::abs(res));
        ++stats.probes;
    }
    return stats;
}

} // namespace pathhjb
