#include "pathhjb/hamiltonian.hpp"

#include <cmath>

#include "pathhjb/errors.hpp"
#include "pathhjb/rng.hpp"

namespace pathhjb {

namespace {

// Anchor arguments read through the path stopped at t: x_i = omega(t_i ^ t).
std::vector<double> anchor_args(const CylindricalTestFunction& phi, const TimedPath& at) {
    const std::size_t q = phi.anchor_times.size();
    const std::size_t d = static_cast<std::size_t>(phi.dim);
    std::vector<double> args(q * d);
    for (std::size_t i = 0; i < q; ++i) {
        double s = std::min(phi.anchor_times[i], at.t);
        eval_path(at.path, s, {args.data() + i * d, d});
    }
    return args;
}

} // namespace

double phi_value(const CylindricalTestFunction& phi, const TimedPath& at) {
    auto args = anchor_args(phi, at);
    return phi.g(at.t, args);
}

double horizontal_derivative(const CylindricalTestFunction& phi, const TimedPath& at) {
    auto args = anchor_args(phi, at);
    return phi.g_t(at.t, args);
}

void vertical_gradient(const CylindricalTestFunction& phi, const TimedPath& at, double* out_d) {
    const std::size_t q = phi.anchor_times.size();
    const std::size_t d = static_cast<std::size_t>(phi.dim);
    auto args = anchor_args(phi, at);
    std::vector<double> grad(q * d);
    phi.g_grad(at.t, args, grad.data());
    for (std::size_t i = 0; i < d; ++i) out_d[i] = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
        if (phi.anchor_times[j] < at.t) continue; // bump starts at t
        for (std::size_t i = 0; i < d; ++i) out_d[i] += grad[j * d + i];
    }
}

void vertical_hessian(const CylindricalTestFunction& phi, const TimedPath& at, double* out_dxd) {
    const std::size_t q = phi.anchor_times.size();
    const std::size_t d = static_cast<std::size_t>(phi.dim);
    const std::size_t n = q * d;
    auto args = anchor_args(phi, at);
    std::vector<double> hess(n * n);
    phi.g_hess(at.t, args, hess.data());
    for (std::size_t i = 0; i < d * d; ++i) out_dxd[i] = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
        if (phi.anchor_times[j] < at.t) continue;
        for (std::size_t k = 0; k < q; ++k) {
            if (phi.anchor_times[k] < at.t) continue;
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b)
                    out_dxd[a * d + b] += hess[(j * d + a) * n + (k * d + b)];
        }
    }
}

namespace {

double generator_at(const CoefficientField& c, const ControlPoint& f, const TimedPath& at,
                    std::span<const double> grad, std::span<const double> hess,
                    std::vector<double>& b, std::vector<double>& s) {
    const std::size_t d = static_cast<std::size_t>(c.dim_d);
    const std::size_t r = static_cast<std::size_t>(c.dim_r);
    c.drift(f, at.t, at.path, b.data());
    c.diffusion(f, at.t, at.path, s.data());
    double lin = 0.0;
    for (std::size_t i = 0; i < d; ++i) lin += grad[i] * b[i];
    // 1/2 tr[H sigma sigma^*] = 1/2 sum_{i,j,l} H_ij s_il s_jl
    double quad = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double ss = 0.0;
            for (std::size_t l = 0; l < r; ++l) ss += s[i * r + l] * s[j * r + l];
            quad += hess[i * d + j] * ss;
        }
    return lin + 0.5 * quad;
}

struct GridMax {
    double value;
    ControlPoint argmax;
};

GridMax maximize_on_grid(const CoefficientField& c, const TimedPath& at,
                         std::span<const double> grad, std::span<const double> hess,
                         int res) {
    ControlGrid grid = make_control_grid(std::vector<int>(static_cast<std::size_t>(c.action_dim), res));
    std::vector<double> b(static_cast<std::size_t>(c.dim_d));
    std::vector<double> s(static_cast<std::size_t>(c.dim_d * c.dim_r));
    GridMax best{-std::numeric_limits<double>::infinity(), {}};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        ControlPoint f = grid.point(k);
        double v = generator_at(c, f, at, grad, hess, b, s);
        if (v > best.value) { // strict: ties keep the lowest lexicographic index
            best.value = v;
            best.argmax = std::move(f);
        }
    }
    return best;
}

} // namespace

GEvaluation evaluate_G(const CoefficientField& c, const TimedPath& at,
                       std::span<const double> grad, std::span<const double> hess,
                       int grid_res) {
    const std::size_t d = static_cast<std::size_t>(c.dim_d);
    if (grad.size() != d || hess.size() != d * d)
        throw ValidationError("evaluate_G: gradient/Hessian shape mismatch");
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            if (std::abs(hess[i * d + j] - hess[j * d + i]) > 1e-12)
                throw ValidationError("evaluate_G: Hessian must be symmetric");
    if (grid_res < 2) throw ValidationError("evaluate_G: grid_res must be >= 2");

    GridMax coarse = maximize_on_grid(c, at, grad, hess, grid_res);
    GridMax fine = maximize_on_grid(c, at, grad, hess, 2 * grid_res - 1);
    GEvaluation out;
    out.value = coarse.value;
    out.argmax_control = coarse.argmax;
    out.gap_certificate = std::abs(fine.value - coarse.value);
    return out;
}

double bang_bang_value(const CoefficientField& c, const TimedPath& at, double grad,
                       double hess) {
    if (!c.bounds) throw ValidationError("bang_bang_value: field has no interval bounds");
    double blo = c.bounds->b_lo(at.t, at.path), bhi = c.bounds->b_hi(at.t, at.path);
    double alo = c.bounds->a_lo(at.t, at.path), ahi = c.bounds->a_hi(at.t, at.path);
    return std::max(grad * blo, grad * bhi) + 0.5 * std::max(hess * alo, hess * ahi);
}

double ppde_residual(const CoefficientField& c, const CylindricalTestFunction& phi,
                     const TimedPath& at, int grid_res) {
    const std::size_t d = static_cast<std::size_t>(c.dim_d);
    std::vector<double> grad(d), hess(d * d);
    vertical_gradient(phi, at, grad.data());
    vertical_hessian(phi, at, hess.data());
    double hd = horizontal_derivative(phi, at);
    return hd + evaluate_G(c, at, grad, hess, grid_res).value;
}

// ---------------------------------------------------------------------------

namespace {

CylindricalTestFunction scalar_fn(std::vector<double> anchors,
                                  std::function<double(double, std::span<const double>)> g,
                                  std::function<double(double, std::span<const double>)> gt,
                                  std::function<void(double, std::span<const double>, double*)> gg,
                                  std::function<void(double, std::span<const double>, double*)> gh,
                                  std::string name) {
    CylindricalTestFunction f;
    f.anchor_times = std::move(anchors);
    f.dim = 1;
    f.g = std::move(g);
    f.g_t = std::move(gt);
    f.g_grad = std::move(gg);
    f.g_hess = std::move(gh);
    f.name = std::move(name);
    return f;
}

} // namespace

CylindricalTestFunction test_fn_time() {
    return scalar_fn(
        {0.0}, [](double t, std::span<const double>) { return t; },
        [](double, std::span<const double>) { return 1.0; },
        [](double, std::span<const double>, double* g) { g[0] = 0.0; },
        [](double, std::span<const double>, double* h) { h[0] = 0.0; }, "t");
}

CylindricalTestFunction test_fn_anchor(double anchor) {
    return scalar_fn(
        {anchor}, [](double, std::span<const double> x) { return x[0]; },
        [](double, std::span<const double>) { return 0.0; },
        [](double, std::span<const double>, double* g) { g[0] = 1.0; },
        [](double, std::span<const double>, double* h) { h[0] = 0.0; }, "x");
}

CylindricalTestFunction test_fn_time_times_anchor(double anchor) {
    return scalar_fn(
        {anchor}, [](double t, std::span<const double> x) { return t * x[0]; },
        [](double, std::span<const double> x) { return x[0]; },
        [](double t, std::span<const double>, double* g) { g[0] = t; },
        [](double, std::span<const double>, double* h) { h[0] = 0.0; }, "t*x");
}

CylindricalTestFunction test_fn_square(double anchor) {
    return scalar_fn(
        {anchor}, [](double, std::span<const double> x) { return x[0] * x[0]; },
        [](double, std::span<const double>) { return 0.0; },
        [](double, std::span<const double> x, double* g) { g[0] = 2.0 * x[0]; },
        [](double, std::span<const double>, double* h) { h[0] = 2.0; }, "x^2");
}

CylindricalTestFunction test_fn_heat(double a, double T) {
    return scalar_fn(
        {T}, [a, T](double t, std::span<const double> x) { return x[0] * x[0] + a * (T - t); },
        [a](double, std::span<const double>) { return -a; },
        [](double, std::span<const double> x, double* g) { g[0] = 2.0 * x[0]; },
        [](double, std::span<const double>, double* h) { h[0] = 2.0; }, "heat");
}

CylindricalTestFunction test_fn_product(double t1, double t2) {
    return scalar_fn(
        {t1, t2}, [](double, std::span<const double> x) { return x[0] * x[1]; },
        [](double, std::span<const double>) { return 0.0; },
        [](double, std::span<const double> x, double* g) {
            g[0] = x[1];
            g[1] = x[0];
        },
        [](double, std::span<const double>, double* h) {
            h[0] = 0.0;
            h[1] = 1.0;
            h[2] = 1.0;
            h[3] = 0.0;
        },
        "x1*x2");
}

CylindricalTestFunction test_fn_sin(double anchor, double freq) {
    return scalar_fn(
        {anchor},
        [freq](double, std::span<const double> x) { return std::sin(freq * x[0]); },
        [](double, std::span<const double>) { return 0.0; },
        [freq](double, std::span<const double> x, double* g) { g[0] = freq * std::cos(freq * x[0]); },
        [freq](double, std::span<const double> x, double* h) { h[0] = -freq * freq * std::sin(freq * x[0]); },
        "sin");
}

CylindricalTestFunction test_fn_random(std::uint64_t seed, int q, double T) {
    RngStream rng(seed, 0xf17);
    std::vector<double> anchors;
    double step = T / (q + 1);
    for (int i = 1; i <= q; ++i) anchors.push_back(i * step + 0.3 * step * rng.uniform(-1.0, 1.0));

    // g(t, x) = c_t * t^2 + sum_i (a_i x_i + b_i x_i^2) + sum_{i<j} c_ij x_i x_j
    const std::size_t n = static_cast<std::size_t>(q);
    double ct = rng.uniform(-1.0, 1.0);
    std::vector<double> lin(n), sq(n), cross(n * n, 0.0);
    for (auto& v : lin) v = rng.uniform(-1.0, 1.0);
    for (auto& v : sq) v = rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) cross[i * n + j] = rng.uniform(-1.0, 1.0);

    auto g = [ct, lin, sq, cross, n](double t, std::span<const double> x) {
        double v = ct * t * t;
        for (std::size_t i = 0; i < n; ++i) v += lin[i] * x[i] + sq[i] * x[i] * x[i];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) v += cross[i * n + j] * x[i] * x[j];
        return v;
    };
    auto gt = [ct](double t, std::span<const double>) { return 2.0 * ct * t; };
    auto gg = [lin, sq, cross, n](double, std::span<const double> x, double* out) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = lin[i] + 2.0 * sq[i] * x[i];
            for (std::size_t j = 0; j < n; ++j) {
                if (j > i) out[i] += cross[i * n + j] * x[j];
                if (j < i) out[i] += cross[j * n + i] * x[j];
            }
        }
    };
    auto gh = [sq, cross, n](double, std::span<const double>, double* out) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j)
                    out[i * n + j] = 2.0 * sq[i];
                else
                    out[i * n + j] = (i < j) ? cross[i * n + j] : cross[j * n + i];
            }
    };
    auto f = scalar_fn(std::move(anchors), g, gt, gg, gh, "random_poly");
    f.poly_q = 2.0;
    return f;
}

} // namespace pathhjb
