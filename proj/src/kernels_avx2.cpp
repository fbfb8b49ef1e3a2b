// AVX2 variants of the lattice and finite-difference sweeps. Every lane
// evaluates the same expression tree as the scalar reference (no FMA, same
// clamp/round/sqrt sequence), so results are bitwise identical to scalar_ops.

#include "pathhjb/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace pathhjb::kernels {

namespace {

// proj3 for four states at once; indices gathered with 32-bit offsets.
inline __m256d proj3_v(const double* v, std::size_t n, __m256d lo_v, __m256d hi_v,
                       __m256d dx_v, __m256d inv2_v, __m256d c) {
    c = _mm256_min_pd(_mm256_max_pd(c, lo_v), hi_v);
    __m256d rel = _mm256_sub_pd(c, lo_v);
    __m256d pos = _mm256_div_pd(rel, dx_v); // division, matching the scalar path
    __m256d kf = _mm256_round_pd(pos, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    kf = _mm256_min_pd(_mm256_max_pd(kf, _mm256_set1_pd(1.0)),
                       _mm256_set1_pd(static_cast<double>(n - 2)));
    __m128i k = _mm256_cvttpd_epi32(kf);
    const __m128i ones = _mm_set1_epi32(1);
    __m256d delta = _mm256_sub_pd(rel, _mm256_mul_pd(kf, dx_v));
    __m256d qm = _mm256_mul_pd(_mm256_mul_pd(delta, _mm256_sub_pd(delta, dx_v)), inv2_v);
    __m256d qp = _mm256_mul_pd(_mm256_mul_pd(delta, _mm256_add_pd(delta, dx_v)), inv2_v);
    __m256d vk = _mm256_i32gather_pd(v, k, 8);
    __m256d vm = _mm256_i32gather_pd(v, _mm_sub_epi32(k, ones), 8);
    __m256d vp = _mm256_i32gather_pd(v, _mm_add_epi32(k, ones), 8);
    __m256d lhs = _mm256_mul_pd(qm, _mm256_sub_pd(vm, vk));
    __m256d rhs = _mm256_mul_pd(qp, _mm256_sub_pd(vp, vk));
    return _mm256_add_pd(vk, _mm256_add_pd(lhs, rhs));
}

void lattice_step_avx2(const double* v_next, std::size_t n, double lo, double dx,
                       const double* b, const double* a, double dt,
                       const double* xi, const double* qw, std::size_t nq,
                       double* out) {
    double hi = lo + static_cast<double>(n - 1) * dx;
    const __m256d lo_v = _mm256_set1_pd(lo);
    const __m256d hi_v = _mm256_set1_pd(hi);
    const __m256d dx_v = _mm256_set1_pd(dx);
    const __m256d inv2_v = _mm256_set1_pd(1.0 / (2.0 * dx * dx));
    const __m256d dt_v = _mm256_set1_pd(dt);
    const __m256d idx_step = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d iv = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(i)), idx_step);
        __m256d x = _mm256_add_pd(lo_v, _mm256_mul_pd(iv, dx_v));
        __m256d bi = _mm256_loadu_pd(b + i);
        __m256d ai = _mm256_loadu_pd(a + i);
        __m256d mean = _mm256_add_pd(x, _mm256_mul_pd(bi, dt_v));
        __m256d sd = _mm256_sqrt_pd(_mm256_mul_pd(ai, dt_v));
        __m256d c0 = _mm256_add_pd(mean, _mm256_mul_pd(sd, _mm256_set1_pd(xi[0])));
        __m256d first = proj3_v(v_next, n, lo_v, hi_v, dx_v, inv2_v, c0);
        __m256d corr = _mm256_setzero_pd();
        for (std::size_t j = 1; j < nq; ++j) {
            __m256d cj = _mm256_add_pd(mean, _mm256_mul_pd(sd, _mm256_set1_pd(xi[j])));
            __m256d pj = proj3_v(v_next, n, lo_v, hi_v, dx_v, inv2_v, cj);
            corr = _mm256_add_pd(
                corr, _mm256_mul_pd(_mm256_set1_pd(qw[j]), _mm256_sub_pd(pj, first)));
        }
        _mm256_storeu_pd(out + i, _mm256_add_pd(first, corr));
    }
    // scalar tail, same expressions
    for (; i < n; ++i) {
        double x = lo + static_cast<double>(i) * dx;
        double mean = x + b[i] * dt;
        double sd = std::sqrt(a[i] * dt);
        auto proj = [&](double c) {
            c = std::min(std::max(c, lo), hi);
            double pos = (c - lo) / dx;
            double kf = std::nearbyint(pos);
            kf = std::min(std::max(kf, 1.0), static_cast<double>(n - 2));
            std::size_t k = static_cast<std::size_t>(kf);
            double delta = (c - lo) - kf * dx;
            double inv2 = 1.0 / (2.0 * dx * dx);
            double qm = delta * (delta - dx) * inv2;
            double qp = delta * (delta + dx) * inv2;
            return v_next[k] + (qm * (v_next[k - 1] - v_next[k]) + qp * (v_next[k + 1] - v_next[k]));
        };
        double first = proj(mean + sd * xi[0]);
        double corr = 0.0;
        for (std::size_t j = 1; j < nq; ++j) corr += qw[j] * (proj(mean + sd * xi[j]) - first);
        out[i] = first + corr;
    }
}

void max_accumulate_avx2(double* acc, const double* cand, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(acc + i);
        __m256d c = _mm256_loadu_pd(cand + i);
        _mm256_storeu_pd(acc + i, _mm256_max_pd(a, c));
    }
    for (; i < n; ++i) acc[i] = std::max(acc[i], cand[i]);
}

void upwind_generator_avx2(const double* w, std::size_t n, double dx,
                           const double* b, const double* a, double* gen) {
    gen[0] = 0.0;
    gen[n - 1] = 0.0;
    double inv_dx = 1.0 / dx;
    double inv_dx2 = inv_dx * inv_dx;
    const __m256d inv_dx_v = _mm256_set1_pd(inv_dx);
    const __m256d inv_dx2_v = _mm256_set1_pd(inv_dx2);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d two = _mm256_set1_pd(2.0);

    std::size_t i = 1;
    for (; i + 4 <= n - 1; i += 4) {
        __m256d wm = _mm256_loadu_pd(w + i - 1);
        __m256d wc = _mm256_loadu_pd(w + i);
        __m256d wp = _mm256_loadu_pd(w + i + 1);
        __m256d dp = _mm256_mul_pd(_mm256_sub_pd(wp, wc), inv_dx_v);
        __m256d dm = _mm256_mul_pd(_mm256_sub_pd(wc, wm), inv_dx_v);
        __m256d dxx = _mm256_mul_pd(
            _mm256_add_pd(_mm256_sub_pd(wp, _mm256_mul_pd(two, wc)), wm), inv_dx2_v);
        __m256d bi = _mm256_loadu_pd(b + i);
        __m256d ai = _mm256_loadu_pd(a + i);
        __m256d bp = _mm256_max_pd(bi, zero);
        __m256d bm = _mm256_min_pd(bi, zero);
        __m256d g = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(bp, dp), _mm256_mul_pd(bm, dm)),
            _mm256_mul_pd(_mm256_mul_pd(half, ai), dxx));
        _mm256_storeu_pd(gen + i, g);
    }
    for (; i + 1 < n; ++i) {
        double dp = (w[i + 1] - w[i]) * inv_dx;
        double dm = (w[i] - w[i - 1]) * inv_dx;
        double dxx = (w[i + 1] - 2.0 * w[i] + w[i - 1]) * inv_dx2;
        double bp = std::max(b[i], 0.0);
        double bm = std::min(b[i], 0.0);
        gen[i] = bp * dp + bm * dm + 0.5 * a[i] * dxx;
    }
}

} // namespace

const Ops* avx2_ops() {
    if (!__builtin_cpu_supports("avx2")) return nullptr;
    static const Ops ops{lattice_step_avx2, max_accumulate_avx2, upwind_generator_avx2,
                         "avx2"};
    return &ops;
}

} // namespace pathhjb::kernels

#else

namespace pathhjb::kernels {
const Ops* avx2_ops() { return nullptr; }
} // namespace pathhjb::kernels

#endif
