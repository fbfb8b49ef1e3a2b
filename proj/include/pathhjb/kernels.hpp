#pragma once

#include <cstddef>

namespace pathhjb::kernels {

// Data-parallel sweeps used by the recombining lattice solver and the
// finite-difference oracle. The scalar versions are the reference; the AVX2
// versions must produce bitwise-identical output (the whole project compiles
// with -ffp-contract=off and the vector code mirrors the scalar expression
// order, so sqrt/round/arithmetic match lane for lane).

struct Ops {
    // For each state x_i = lo + i*dx:
    //   mean      = x_i + b[i]*dt
    //   child_j   = mean + sqrt(a[i]*dt) * xi[j]
    //   out[i]    = sum_j qw[j] * proj3(v_next, child_j)
    // proj3 places a point onto its three nearest grid states with weights
    // matching the point's first and second moment (exact on quadratics):
    //   k = clamp(round((c - lo)/dx), 1, n-2), delta = c - x_k
    //   qm = delta*(delta - dx) / (2 dx^2), qp = delta*(delta + dx) / (2 dx^2)
    //   value = v[k] + qm*(v[k-1] - v[k]) + qp*(v[k+1] - v[k])
    // The anchored form keeps constants exact. The quadrature sum is anchored
    // at the j = 0 child for the same reason.
    void (*lattice_step)(const double* v_next, std::size_t n, double lo, double dx,
                         const double* b, const double* a, double dt,
                         const double* xi, const double* qw, std::size_t nq,
                         double* out);

    // acc[i] = max(acc[i], cand[i])
    void (*max_accumulate)(double* acc, const double* cand, std::size_t n);

    // Monotone upwind generator on interior states i in [1, n-2]:
    //   gen[i] = max(b,0)*(w[i+1]-w[i])/dx + min(b,0)*(w[i]-w[i-1])/dx
    //          + 0.5*a[i]*(w[i+1]-2w[i]+w[i-1])/dx^2
    // gen[0] and gen[n-1] are set to 0.
    void (*upwind_generator)(const double* w, std::size_t n, double dx,
                             const double* b, const double* a, double* gen);

    const char* name;
};

const Ops& scalar_ops();

/// Null when the binary or the CPU lacks AVX2 support.
const Ops* avx2_ops();

/// Runtime selection: AVX2 when available, scalar otherwise. The environment
/// variable PATHHJB_KERNEL=scalar|avx2 forces a backend (avx2 falls back to
/// scalar with a note to stderr when unsupported).
const Ops& active_ops();

} // namespace pathhjb::kernels
