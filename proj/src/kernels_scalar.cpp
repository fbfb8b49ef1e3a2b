#include "pathhjb/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace pathhjb::kernels {

namespace {

// Clamps the point into the grid (constant continuation past the edges),
// then projects onto the three nearest states.
inline double proj3(const double* v, std::size_t n, double lo, double hi, double dx,
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

void lattice_step_scalar(const double* v_next, std::size_t n, double lo, double dx,
                         const double* b, const double* a, double dt,
                         const double* xi, const double* qw, std::size_t nq,
                         double* out) {
    double hi = lo + static_cast<double>(n - 1) * dx;
    for (std::size_t i = 0; i < n; ++i) {
        double x = lo + static_cast<double>(i) * dx;
        double mean = x + b[i] * dt;
        double sd = std::sqrt(a[i] * dt);
        double first = proj3(v_next, n, lo, hi, dx, mean + sd * xi[0]);
        double corr = 0.0;
        for (std::size_t j = 1; j < nq; ++j)
            corr += qw[j] * (proj3(v_next, n, lo, hi, dx, mean + sd * xi[j]) - first);
        // anchored at the first child: exact when all children agree
        out[i] = first + corr;
    }
}

void max_accumulate_scalar(double* acc, const double* cand, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] = std::max(acc[i], cand[i]);
}

void upwind_generator_scalar(const double* w, std::size_t n, double dx,
                             const double* b, const double* a, double* gen) {
    gen[0] = 0.0;
    gen[n - 1] = 0.0;
    double inv_dx = 1.0 / dx;
    double inv_dx2 = inv_dx * inv_dx;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double dp = (w[i + 1] - w[i]) * inv_dx;
        double dm = (w[i] - w[i - 1]) * inv_dx;
        double dxx = (w[i + 1] - 2.0 * w[i] + w[i - 1]) * inv_dx2;
        double bp = std::max(b[i], 0.0);
        double bm = std::min(b[i], 0.0);
        gen[i] = bp * dp + bm * dm + 0.5 * a[i] * dxx;
    }
}

} // namespace

const Ops& scalar_ops() {
    static const Ops ops{lattice_step_scalar, max_accumulate_scalar,
                         upwind_generator_scalar, "scalar"};
    return ops;
}

} // namespace pathhjb::kernels
