#include "pathhjb/path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "pathhjb/errors.hpp"

namespace pathhjb {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ValidationError("path: " + msg); }

// Index of the last knot with grid[i] <= t.
std::size_t knot_before(const SampledPath& p, double t) {
    auto it = std::upper_bound(p.grid.begin(), p.grid.end(), t);
    if (it == p.grid.begin()) fail("time before start of grid");
    return static_cast<std::size_t>(it - p.grid.begin()) - 1;
}

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

} // namespace

void validate_path(const SampledPath& p) {
    if (p.dim <= 0) fail("dim must be positive");
    if (p.grid.empty()) fail("grid must be nonempty");
    if (std::abs(p.grid.front()) > 0.0) fail("grid must start at 0");
    for (std::size_t i = 1; i < p.grid.size(); ++i)
        if (!(p.grid[i] > p.grid[i - 1])) fail("grid must be strictly increasing");
    if (p.values.size() != p.grid.size() * static_cast<std::size_t>(p.dim))
        fail("values length must equal knots * dim");
    for (double v : p.values)
        if (!std::isfinite(v)) fail("non-finite coordinate");
    for (double t : p.grid)
        if (!std::isfinite(t)) fail("non-finite knot time");
}

void validate_timed_path(const TimedPath& tp) {
    validate_path(tp.path);
    if (!(tp.t >= 0.0) || tp.t > tp.path.horizon() + kKnotMergeTol)
        fail("current time outside [0, horizon]");
}

SampledPath make_constant_path(std::span<const double> x, double horizon) {
    SampledPath p;
    p.dim = static_cast<int>(x.size());
    p.grid = {0.0};
    p.values.assign(x.begin(), x.end());
    if (horizon > 0.0) {
        p.grid.push_back(horizon);
        p.values.insert(p.values.end(), x.begin(), x.end());
    }
    validate_path(p);
    return p;
}

SampledPath make_path1(std::vector<double> grid, std::vector<double> values) {
    SampledPath p;
    p.dim = 1;
    p.grid = std::move(grid);
    p.values = std::move(values);
    validate_path(p);
    return p;
}

void eval_path(const SampledPath& p, double t, std::span<double> out) {
    if (t < 0.0) fail("negative time");
    if (t >= p.grid.back()) {
        auto last = p.knot_value(p.knots() - 1);
        std::copy(last.begin(), last.end(), out.begin());
        return;
    }
    std::size_t k = knot_before(p, t);
    double t0 = p.grid[k], t1 = p.grid[k + 1];
    double w = (t - t0) / (t1 - t0);
    auto a = p.knot_value(k);
    auto b = p.knot_value(k + 1);
    for (int i = 0; i < p.dim; ++i) out[i] = a[i] + w * (b[i] - a[i]);
}

double eval_path1(const SampledPath& p, double t) {
    double x;
    eval_path(p, t, {&x, 1});
    return x;
}

SampledPath append_knot(const SampledPath& p, double t, std::span<const double> x) {
    if (!(t > p.grid.back())) fail("appended knot must be after the last one");
    SampledPath r = p;
    r.grid.push_back(t);
    r.values.insert(r.values.end(), x.begin(), x.end());
    return r;
}

SampledPath stop(const SampledPath& p, double t) {
    if (t < -kKnotMergeTol || t > p.horizon() + kKnotMergeTol)
        fail("stop time outside path horizon");
    t = std::clamp(t, 0.0, p.horizon());

    std::vector<double> frozen(static_cast<std::size_t>(p.dim));
    eval_path(p, t, frozen);

    SampledPath r;
    r.dim = p.dim;
    bool inserted = false;
    for (std::size_t k = 0; k < p.knots(); ++k) {
        double tk = p.grid[k];
        if (tk < t - kKnotMergeTol) {
            r.grid.push_back(tk);
            auto v = p.knot_value(k);
            r.values.insert(r.values.end(), v.begin(), v.end());
        } else {
            if (!inserted) {
                // knot at t itself; keep the path's own time if they coincide
                double tt = (std::abs(tk - t) <= kKnotMergeTol) ? tk : t;
                r.grid.push_back(tt);
                r.values.insert(r.values.end(), frozen.begin(), frozen.end());
                inserted = true;
                if (std::abs(tk - t) <= kKnotMergeTol) continue;
            }
            if (tk > r.grid.back() + kKnotMergeTol) {
                r.grid.push_back(tk);
                r.values.insert(r.values.end(), frozen.begin(), frozen.end());
            }
        }
    }
    if (!inserted) { // t beyond all knots (t == horizon of a 1-knot path)
        if (t > r.grid.back() + kKnotMergeTol) {
            r.grid.push_back(t);
            r.values.insert(r.values.end(), frozen.begin(), frozen.end());
        }
    }
    return r;
}

SampledPath concat(const SampledPath& p, double t, const SampledPath& q) {
    if (p.dim != q.dim) fail("concat dimension mismatch");
    if (t < -kKnotMergeTol || t > p.horizon() + kKnotMergeTol)
        fail("concat time outside first path's horizon");
    if (std::abs(q.grid.front()) > 0.0) fail("continuation path must start at time 0");
    t = std::clamp(t, 0.0, p.horizon());

    const std::size_t d = static_cast<std::size_t>(p.dim);
    std::vector<double> pt(d), q0(d);
    eval_path(p, t, pt);
    eval_path(q, 0.0, q0);

    SampledPath r;
    r.dim = p.dim;
    auto push = [&](double time, std::span<const double> v) {
        if (!r.grid.empty() && time <= r.grid.back() + kKnotMergeTol) return; // keep earlier value
        r.grid.push_back(time);
        r.values.insert(r.values.end(), v.begin(), v.end());
    };

    for (std::size_t k = 0; k < p.knots() && p.grid[k] < t - kKnotMergeTol; ++k)
        push(p.grid[k], p.knot_value(k));

    std::vector<double> v(d);
    auto continued = [&](double s) { // value at absolute time s >= t
        eval_path(q, s - t, v);
        for (std::size_t i = 0; i < d; ++i) v[i] = pt[i] + (v[i] - q0[i]);
    };

    continued(t);
    push(t, v);
    for (std::size_t k = 0; k < q.knots(); ++k) {
        double s = t + q.grid[k];
        continued(s);
        push(s, v);
    }
    // Original horizon may extend past the continuation; the result stays
    // constant there (continuation path extends at its last value).
    double tail_end = t + q.horizon();
    if (p.horizon() > tail_end + kKnotMergeTol) {
        continued(p.horizon());
        push(p.horizon(), v);
    }
    return r;
}

double sup_norm(const SampledPath& p, double t) {
    if (t < 0.0 || t > p.horizon() + kKnotMergeTol) fail("sup_norm time outside horizon");
    double best = 0.0;
    for (std::size_t k = 0; k < p.knots() && p.grid[k] <= t; ++k)
        best = std::max(best, norm2(p.knot_value(k)));
    std::vector<double> v(static_cast<std::size_t>(p.dim));
    eval_path(p, t, v);
    best = std::max(best, norm2(v));
    return best;
}

double stopped_sup_distance(const SampledPath& p, double t,
                            const SampledPath& q, double s, double r_max) {
    if (p.dim != q.dim) fail("distance dimension mismatch");
    std::vector<double> rs;
    rs.reserve(p.knots() + q.knots() + 4);
    rs.push_back(0.0);
    rs.push_back(std::min(t, r_max));
    rs.push_back(std::min(s, r_max));
    rs.push_back(r_max);
    for (double r : p.grid)
        if (r <= r_max) rs.push_back(r);
    for (double r : q.grid)
        if (r <= r_max) rs.push_back(r);

    const std::size_t d = static_cast<std::size_t>(p.dim);
    std::vector<double> a(d), b(d);
    double best = 0.0;
    for (double r : rs) {
        eval_path(p, std::min(r, t), a);
        eval_path(q, std::min(r, s), b);
        double acc = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double diff = a[i] - b[i];
            acc += diff * diff;
        }
        best = std::max(best, std::sqrt(acc));
    }
    return best;
}

double metric_d(const TimedPath& a, const TimedPath& b, double T) {
    if (a.t > T + kKnotMergeTol || b.t > T + kKnotMergeTol)
        fail("metric time beyond horizon T");
    // parenthesized so that swapping the arguments is bitwise symmetric
    double growth = 1.0 + (sup_norm(a.path, a.t) + sup_norm(b.path, b.t));
    double dt = std::sqrt(std::abs(a.t - b.t));
    return growth * dt + stopped_sup_distance(a.path, a.t, b.path, b.t, T);
}

double metric_dstar(const TimedPath& a, const TimedPath& b, double T) {
    if (a.t > T + kKnotMergeTol || b.t > T + kKnotMergeTol)
        fail("metric time beyond horizon T");
    return std::abs(a.t - b.t) + stopped_sup_distance(a.path, a.t, b.path, b.t, T);
}

bool paths_equal(const SampledPath& p, const SampledPath& q, double tol) {
    if (p.dim != q.dim) return false;
    std::vector<double> ts;
    ts.insert(ts.end(), p.grid.begin(), p.grid.end());
    ts.insert(ts.end(), q.grid.begin(), q.grid.end());
    std::sort(ts.begin(), ts.end());
    const std::size_t d = static_cast<std::size_t>(p.dim);
    std::vector<double> a(d), b(d);
    for (double t : ts) {
        eval_path(p, t, a);
        eval_path(q, t, b);
        for (std::size_t i = 0; i < d; ++i)
            if (std::abs(a[i] - b[i]) > tol) return false;
    }
    return true;
}

} // namespace pathhjb
