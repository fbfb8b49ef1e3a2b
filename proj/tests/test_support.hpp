#pragma once

// Shared helpers for the test suites: quick field builders, random path
// generators, bump oracles for the functional derivatives, and a small
// convex-hull utility for the attainable-set check.

#include <algorithm>
#include <cmath>
#include <vector>

#include "pathhjb/coefficients.hpp"
#include "pathhjb/hamiltonian.hpp"
#include "pathhjb/path.hpp"
#include "pathhjb/rng.hpp"

namespace pathhjb::testing {

inline SampledPath const_path1(double x, double horizon) {
    return make_constant_path(std::span<const double>(&x, 1), horizon);
}

/// Clamped random walk on a uniform grid, |values| <= R.
inline SampledPath random_path1(std::uint64_t seed, std::uint64_t idx, double R, double T,
                                int knots) {
    RngStream rng(seed, idx);
    SampledPath w;
    w.dim = 1;
    double x = rng.uniform(-R / 2, R / 2);
    for (int k = 0; k <= knots; ++k) {
        w.grid.push_back(T * k / knots);
        w.values.push_back(x);
        x = std::clamp(x + rng.uniform(-R / 3, R / 3), -R, R);
    }
    return w;
}

/// Interval-bound field from constants.
inline CoefficientField const_random_g(double b_lo, double b_hi, double a_lo, double a_hi,
                                       TerminalSpec terminal, double T = 1.0,
                                       double bound_C = 0.0) {
    RandomGSpec spec;
    spec.b_lo = bound_constant(b_lo);
    spec.b_hi = bound_constant(b_hi);
    spec.a_lo = bound_constant(a_lo);
    spec.a_hi = bound_constant(a_hi);
    if (bound_C <= 0.0) {
        bound_C = std::max({std::abs(b_lo), std::abs(b_hi), a_hi, 1.0 / a_lo, 1.0});
    }
    spec.bound_C = bound_C;
    CoefficientField c = make_random_g(spec, T, terminal.path);
    c.markovian = true;
    c.terminal_state = terminal.state;
    c.terminal_bound_C = terminal.bound_C;
    c.terminal_lipschitz_C = terminal.lipschitz_C;
    c.lipschitz_C = 0.0;
    return c;
}

/// Difference-quotient oracle for the horizontal derivative:
/// (phi(t+h, stopped) - phi(t, stopped)) / h with Richardson over an h sweep.
inline double horizontal_oracle(const CylindricalTestFunction& phi, const TimedPath& at) {
    SampledPath frozen = stop(at.path, std::min(at.t, at.path.horizon()));
    auto quotient = [&](double h) {
        TimedPath hi{at.t + h, frozen};
        TimedPath lo{at.t, frozen};
        return (phi_value(phi, hi) - phi_value(phi, lo)) / h;
    };
    double q1 = quotient(1e-3);
    double q2 = quotient(1e-4);
    // one Richardson step on the leading O(h) error (h shrinks by 10)
    return (10.0 * q2 - q1) / 9.0;
}

/// Path bumped by h * e_i on [t, horizon].
inline SampledPath bump_path(const SampledPath& p, double t, int axis, double h) {
    SampledPath r = p;
    // insert a knot at t if absent, then shift every knot at or after t
    bool has_t = false;
    for (double g : r.grid) has_t = has_t || std::abs(g - t) <= kKnotMergeTol;
    if (!has_t && t < r.horizon()) {
        SampledPath tmp;
        tmp.dim = r.dim;
        std::vector<double> vt(static_cast<std::size_t>(r.dim));
        eval_path(r, t, vt);
        for (std::size_t k = 0; k < r.knots(); ++k) {
            if (r.grid[k] < t) {
                tmp.grid.push_back(r.grid[k]);
                auto v = r.knot_value(k);
                tmp.values.insert(tmp.values.end(), v.begin(), v.end());
            }
        }
        tmp.grid.push_back(t);
        tmp.values.insert(tmp.values.end(), vt.begin(), vt.end());
        for (std::size_t k = 0; k < r.knots(); ++k) {
            if (r.grid[k] > t) {
                tmp.grid.push_back(r.grid[k]);
                auto v = r.knot_value(k);
                tmp.values.insert(tmp.values.end(), v.begin(), v.end());
            }
        }
        r = std::move(tmp);
    }
    for (std::size_t k = 0; k < r.knots(); ++k)
        if (r.grid[k] >= t - kKnotMergeTol)
            r.values[k * static_cast<std::size_t>(r.dim) + static_cast<std::size_t>(axis)] += h;
    return r;
}

/// Central-difference oracle for the vertical gradient entry.
inline double vertical_oracle(const CylindricalTestFunction& phi, const TimedPath& at,
                              int axis, double h = 1e-5) {
    TimedPath up{at.t, bump_path(at.path, at.t, axis, h)};
    TimedPath dn{at.t, bump_path(at.path, at.t, axis, -h)};
    return (phi_value(phi, up) - phi_value(phi, dn)) / (2.0 * h);
}

/// Central second difference for the vertical Hessian entry (i == j only;
/// the 1d suites need nothing more).
inline double vertical_hessian_oracle(const CylindricalTestFunction& phi,
                                      const TimedPath& at, int axis, double h = 1e-4) {
    TimedPath up{at.t, bump_path(at.path, at.t, axis, h)};
    TimedPath dn{at.t, bump_path(at.path, at.t, axis, -h)};
    return (phi_value(phi, up) - 2.0 * phi_value(phi, at) + phi_value(phi, dn)) / (h * h);
}

// ---------------------------------------------------------------------------
// Planar convex hull (Andrew monotone chain) and a covering check used by the
// attainable-set convexity surrogate.

struct P2 {
    double x, y;
};

inline double cross(const P2& o, const P2& a, const P2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline std::vector<P2> convex_hull(std::vector<P2> pts) {
    std::sort(pts.begin(), pts.end(), [](const P2& a, const P2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const P2& a, const P2& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    if (pts.size() < 3) return pts;
    std::vector<P2> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

inline bool point_in_hull(const std::vector<P2>& hull, const P2& q) {
    if (hull.size() < 3) return false;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const P2& a = hull[i];
        const P2& b = hull[(i + 1) % hull.size()];
        if (cross(a, b, q) < -1e-12) return false;
    }
    return true;
}

/// Max over random points inside the hull of the distance to the nearest
/// sample; shrinks as the sample grid refines when the set fills its hull.
inline double hull_covering_radius(const std::vector<P2>& samples, std::uint64_t seed,
                                   int n_queries = 400) {
    auto hull = convex_hull(samples);
    if (hull.size() < 3) return 0.0;
    double xmin = hull[0].x, xmax = hull[0].x, ymin = hull[0].y, ymax = hull[0].y;
    for (const auto& p : hull) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    RngStream rng(seed, 0);
    double worst = 0.0;
    int found = 0;
    while (found < n_queries) {
        P2 q{rng.uniform(xmin, xmax), rng.uniform(ymin, ymax)};
        if (!point_in_hull(hull, q)) continue;
        ++found;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& s : samples) {
            double d = std::hypot(s.x - q.x, s.y - q.y);
            best = std::min(best, d);
        }
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace pathhjb::testing
