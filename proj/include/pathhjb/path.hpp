#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pathhjb {

/// A continuous path on [0, horizon] stored as values on a time grid.
/// Between knots the path is the linear interpolant; past the last knot it
/// continues at the last value. Treated as immutable after construction.
struct SampledPath {
    std::vector<double> grid;   ///< knot times, strictly increasing, grid[0] == 0
    std::vector<double> values; ///< knot-major, dim entries per knot
    int dim = 1;

    std::size_t knots() const { return grid.size(); }
    double horizon() const { return grid.empty() ? 0.0 : grid.back(); }
    std::span<const double> knot_value(std::size_t k) const {
        return {values.data() + k * static_cast<std::size_t>(dim),
                static_cast<std::size_t>(dim)};
    }
};

/// A path together with a current-time marker t in [0, horizon].
struct TimedPath {
    double t = 0.0;
    SampledPath path;
};

/// Tolerance below which two knot times are treated as the same instant.
inline constexpr double kKnotMergeTol = 1e-12;

/// Throws ValidationError if the grid is not strictly increasing starting at 0,
/// the value array has the wrong length, or any coordinate is non-finite.
void validate_path(const SampledPath& p);
void validate_timed_path(const TimedPath& tp);

SampledPath make_constant_path(std::span<const double> x, double horizon);
SampledPath make_path1(std::vector<double> grid, std::vector<double> values);

/// Evaluates the path at time t (linear interpolation, constant extension).
void eval_path(const SampledPath& p, double t, std::span<double> out);
double eval_path1(const SampledPath& p, double t); // dim == 1 fast path

/// Returns the path with a knot appended at time t (> last knot time).
SampledPath append_knot(const SampledPath& p, double t, std::span<const double> x);

/// The path frozen at time t: equal to p on [0, t], constant at p(t) afterward.
/// The returned grid contains t as a knot and keeps the later knot times.
SampledPath stop(const SampledPath& p, double t);

/// Follows p up to t, then continues with the increments of q:
/// result(s) = p(s) on [0, t), and p(t) + q(s - t) - q(0) for s >= t.
SampledPath concat(const SampledPath& p, double t, const SampledPath& q);

/// max over s in [0, t] of the Euclidean norm of p(s). Exact for sampled
/// paths: the norm is convex along each linear segment, so knots plus the
/// interpolated value at t suffice.
double sup_norm(const SampledPath& p, double t);

/// sup over r in [0, t] of || p(r) - q(r') || with r' = min(r, s); helper for
/// the metrics below. Evaluated on the union of knot sets plus {t, s}.
double stopped_sup_distance(const SampledPath& p, double t,
                            const SampledPath& q, double s, double r_max);

/// (1 + sup-norms) * |t - s|^(1/2) + stopped sup distance over [0, T].
double metric_d(const TimedPath& a, const TimedPath& b, double T);

/// |t - s| + stopped sup distance over [0, T].
double metric_dstar(const TimedPath& a, const TimedPath& b, double T);

/// True when p and q describe the same function on [0, max horizon] to tol,
/// checked on the union of both knot sets.
bool paths_equal(const SampledPath& p, const SampledPath& q, double tol = 0.0);

} // namespace pathhjb
