#include "pathhjb/coefficients.hpp"

#include <algorithm>
#include <cmath>

#include "pathhjb/errors.hpp"
#include "pathhjb/parallel.hpp"
#include "pathhjb/rng.hpp"

namespace pathhjb {

std::size_t ControlGrid::size() const {
    std::size_t n = 1;
    for (int r : res) n *= static_cast<std::size_t>(r);
    return n;
}

ControlPoint ControlGrid::point(std::size_t flat) const {
    ControlPoint p;
    p.coords.resize(res.size());
    p.index.resize(res.size());
    // last axis fastest, so ascending flat index is lexicographic in the tuple
    for (std::size_t a = res.size(); a-- > 0;) {
        int r = res[a];
        int i = static_cast<int>(flat % static_cast<std::size_t>(r));
        flat /= static_cast<std::size_t>(r);
        p.index[a] = i;
        p.coords[a] = (r == 1) ? 0.0 : static_cast<double>(i) / (r - 1);
    }
    return p;
}

ControlGrid make_control_grid(std::vector<int> res) {
    if (res.empty()) throw ValidationError("control grid: empty resolution list");
    for (int r : res)
        if (r < 1) throw ValidationError("control grid: resolutions must be >= 1");
    return ControlGrid{std::move(res)};
}

// ---------------------------------------------------------------------------

CoefficientField make_random_g(const RandomGSpec& spec, double horizon_T,
                               TerminalFn terminal, std::string name) {
    if (!(horizon_T > 0.0)) throw ValidationError("random_g: horizon must be positive");
    if (!(spec.bound_C > 0.0)) throw ValidationError("random_g: bound_C must be positive");

    // Probe sweep for the declared interval invariants.
    auto probes = make_probe_set(0x5eedu, 64, 2.0 * spec.bound_C, horizon_T, 6, 2);
    for (const auto& pr : probes) {
        double t = std::min(pr.t, horizon_T);
        double blo = spec.b_lo(t, pr.omega), bhi = spec.b_hi(t, pr.omega);
        double alo = spec.a_lo(t, pr.omega), ahi = spec.a_hi(t, pr.omega);
        if (!(alo > 0.0)) throw ValidationError("random_g: a_lo <= 0 on a probe");
        if (blo > bhi + 1e-15) throw ValidationError("random_g: b_lo > b_hi on a probe");
        if (alo > ahi + 1e-15) throw ValidationError("random_g: a_lo > a_hi on a probe");
        double C = spec.bound_C;
        if (std::abs(blo) > C + 1e-12 || std::abs(bhi) > C + 1e-12)
            throw ValidationError("random_g: drift bound exceeds bound_C on a probe");
        if (alo < 1.0 / C - 1e-12 || ahi > C + 1e-12)
            throw ValidationError("random_g: variance bound outside [1/C, C] on a probe");
    }

    auto bounds = std::make_shared<CoefficientField::IntervalBounds>();
    bounds->b_lo = spec.b_lo;
    bounds->b_hi = spec.b_hi;
    bounds->a_lo = spec.a_lo;
    bounds->a_hi = spec.a_hi;
    bounds->bound_C = spec.bound_C;

    CoefficientField c;
    c.dim_d = 1;
    c.dim_r = 1;
    c.action_dim = 2;
    c.horizon_T = horizon_T;
    c.growth_C = spec.bound_C + std::sqrt(spec.bound_C);
    c.terminal = std::move(terminal);
    c.name = std::move(name);
    c.bounds = bounds;
    c.drift = [bounds](const ControlPoint& f, double t, const SampledPath& w, double* out) {
        double lo = bounds->b_lo(t, w);
        out[0] = lo + f[0] * (bounds->b_hi(t, w) - lo);
    };
    c.diffusion = [bounds](const ControlPoint& f, double t, const SampledPath& w, double* out) {
        double lo = bounds->a_lo(t, w);
        out[0] = std::sqrt(lo + f[1] * (bounds->a_hi(t, w) - lo));
    };
    return c;
}

// ---------------------------------------------------------------------------

namespace {

double clip(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

double running_max_abs(const SampledPath& w, double t) { return sup_norm(w, std::min(t, w.horizon())); }

} // namespace

BoundFn bound_constant(double value) {
    return [value](double, const SampledPath&) { return value; };
}

BoundFn bound_state_affine(double c0, double c1, double clip_lo, double clip_hi) {
    return [=](double t, const SampledPath& w) {
        return clip(c0 + c1 * eval_path1(w, std::min(t, w.horizon())), clip_lo, clip_hi);
    };
}

BoundFn bound_running_max(double c0, double c1, double clip_lo, double clip_hi) {
    return [=](double t, const SampledPath& w) {
        return clip(c0 + c1 * running_max_abs(w, t), clip_lo, clip_hi);
    };
}

BoundFn bound_delayed(double delay, double c0, double c1, double clip_lo, double clip_hi) {
    return [=](double t, const SampledPath& w) {
        double s = std::max(t - delay, 0.0);
        return clip(c0 + c1 * eval_path1(w, std::min(s, w.horizon())), clip_lo, clip_hi);
    };
}

TerminalSpec terminal_constant(double c) {
    TerminalSpec s;
    s.path = [c](const SampledPath&) { return c; };
    s.state = [c](double) { return c; };
    s.bound_C = std::abs(c);
    s.lipschitz_C = 0.0;
    return s;
}

TerminalSpec terminal_identity() {
    TerminalSpec s;
    s.path = [](const SampledPath& w) { return eval_path1(w, w.horizon()); };
    s.state = [](double x) { return x; };
    s.lipschitz_C = 1.0;
    return s;
}

TerminalSpec terminal_square() {
    TerminalSpec s;
    s.path = [](const SampledPath& w) {
        double x = eval_path1(w, w.horizon());
        return x * x;
    };
    s.state = [](double x) { return x * x; };
    return s; // unbounded; bound/Lipschitz only hold on declared compacts
}

TerminalSpec terminal_abs() {
    TerminalSpec s;
    s.path = [](const SampledPath& w) { return std::abs(eval_path1(w, w.horizon())); };
    s.state = [](double x) { return std::abs(x); };
    s.lipschitz_C = 1.0;
    return s;
}

TerminalSpec terminal_call(double strike) {
    TerminalSpec s;
    s.path = [strike](const SampledPath& w) {
        return std::max(eval_path1(w, w.horizon()) - strike, 0.0);
    };
    s.state = [strike](double x) { return std::max(x - strike, 0.0); };
    s.lipschitz_C = 1.0;
    return s;
}

TerminalSpec terminal_clipped_identity(double cap) {
    TerminalSpec s;
    s.path = [cap](const SampledPath& w) { return clip(eval_path1(w, w.horizon()), -cap, cap); };
    s.state = [cap](double x) { return clip(x, -cap, cap); };
    s.bound_C = cap;
    s.lipschitz_C = 1.0;
    return s;
}

TerminalSpec terminal_clipped_square(double cap) {
    TerminalSpec s;
    s.path = [cap](const SampledPath& w) {
        double x = eval_path1(w, w.horizon());
        return std::min(x * x, cap);
    };
    s.state = [cap](double x) { return std::min(x * x, cap); };
    s.bound_C = cap;
    s.lipschitz_C = 2.0 * std::sqrt(cap);
    return s;
}

TerminalSpec terminal_clipped_abs(double cap) {
    TerminalSpec s;
    s.path = [cap](const SampledPath& w) { return std::min(std::abs(eval_path1(w, w.horizon())), cap); };
    s.state = [cap](double x) { return std::min(std::abs(x), cap); };
    s.bound_C = cap;
    s.lipschitz_C = 1.0;
    return s;
}

TerminalSpec terminal_running_max() {
    TerminalSpec s;
    s.path = [](const SampledPath& w) {
        double best = w.values[0];
        for (std::size_t k = 0; k < w.knots(); ++k) best = std::max(best, w.values[k]);
        return best;
    };
    s.state = nullptr;
    s.lipschitz_C = 1.0;
    return s;
}

// ---------------------------------------------------------------------------

std::vector<Probe> make_probe_set(std::uint64_t seed, std::size_t count, double R,
                                  double T, int path_knots, int action_dim) {
    std::vector<Probe> probes;
    probes.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        RngStream rng(seed, i);
        SampledPath w;
        w.dim = 1;
        double x = rng.uniform(-R / 2, R / 2);
        double dt = T / path_knots;
        for (int k = 0; k <= path_knots; ++k) {
            w.grid.push_back(k * dt);
            w.values.push_back(x);
            x = clip(x + rng.uniform(-R / 3, R / 3), -R, R);
        }
        Probe p;
        p.omega = std::move(w);
        p.t = rng.uniform(0.0, T);
        p.f.coords.resize(static_cast<std::size_t>(action_dim));
        for (auto& cc : p.f.coords) cc = rng.uniform(0.0, 1.0);
        probes.push_back(std::move(p));
    }
    return probes;
}

namespace {

// Shifts every knot strictly after t by `bump` (the knot at t itself is first
// pinned by a stop to keep the prefix intact).
SampledPath perturb_tail(const SampledPath& w, double t, double bump) {
    SampledPath pinned = stop(w, std::min(t, w.horizon()));
    // restore the original tail before shifting, so the perturbation is a
    // genuine change of the future, not of the frozen continuation
    SampledPath r = w;
    bool has_t = false;
    for (double g : r.grid) has_t = has_t || std::abs(g - t) <= kKnotMergeTol;
    if (!has_t && t < r.horizon()) {
        // insert a knot at t so the shift cannot leak into [0, t]
        SampledPath with_knot;
        with_knot.dim = r.dim;
        std::vector<double> vt(static_cast<std::size_t>(r.dim));
        eval_path(r, t, vt);
        for (std::size_t k = 0; k < r.knots(); ++k) {
            if (r.grid[k] < t - kKnotMergeTol) {
                with_knot.grid.push_back(r.grid[k]);
                auto v = r.knot_value(k);
                with_knot.values.insert(with_knot.values.end(), v.begin(), v.end());
            }
        }
        with_knot.grid.push_back(t);
        with_knot.values.insert(with_knot.values.end(), vt.begin(), vt.end());
        for (std::size_t k = 0; k < r.knots(); ++k) {
            if (r.grid[k] > t + kKnotMergeTol) {
                with_knot.grid.push_back(r.grid[k]);
                auto v = r.knot_value(k);
                with_knot.values.insert(with_knot.values.end(), v.begin(), v.end());
            }
        }
        r = std::move(with_knot);
    }
    for (std::size_t k = 0; k < r.knots(); ++k) {
        if (r.grid[k] > t + kKnotMergeTol)
            for (int i = 0; i < r.dim; ++i)
                r.values[k * static_cast<std::size_t>(r.dim) + static_cast<std::size_t>(i)] += bump;
    }
    return r;
}

double eval_discrepancy(const CoefficientField& c, const Probe& p, const SampledPath& other) {
    std::vector<double> b1(static_cast<std::size_t>(c.dim_d)), b2(b1.size());
    std::vector<double> s1(static_cast<std::size_t>(c.dim_d * c.dim_r)), s2(s1.size());
    c.drift(p.f, p.t, p.omega, b1.data());
    c.drift(p.f, p.t, other, b2.data());
    c.diffusion(p.f, p.t, p.omega, s1.data());
    c.diffusion(p.f, p.t, other, s2.data());
    double m = 0.0;
    for (std::size_t i = 0; i < b1.size(); ++i) m = std::max(m, std::abs(b1[i] - b2[i]));
    for (std::size_t i = 0; i < s1.size(); ++i) m = std::max(m, std::abs(s1[i] - s2[i]));
    return m;
}

} // namespace

NonAnticipativityReport validate_nonanticipativity(const CoefficientField& c,
                                                   std::span<const Probe> probes,
                                                   unsigned threads, double bump) {
    std::vector<double> disc(probes.size(), 0.0);
    parallel_for(probes.size(), threads, [&](std::size_t i) {
        const Probe& p = probes[i];
        if (p.t > c.horizon_T) return;
        SampledPath shifted = perturb_tail(p.omega, p.t, bump);
        disc[i] = eval_discrepancy(c, p, shifted);
    });
    NonAnticipativityReport rep;
    for (std::size_t i = 0; i < disc.size(); ++i) {
        if (disc[i] > rep.max_discrepancy) rep.max_discrepancy = disc[i];
        if (disc[i] > 1e-12) {
            ++rep.failures;
            if (rep.detail.empty())
                rep.detail = "probe " + std::to_string(i) + " discrepancy " + std::to_string(disc[i]);
        }
    }
    rep.pass = rep.failures == 0;
    return rep;
}

GrowthReport validate_growth_against(const CoefficientField& c, double shared_C,
                                     std::span<const Probe> probes, unsigned threads) {
    std::vector<double> ratio(probes.size(), 0.0);
    parallel_for(probes.size(), threads, [&](std::size_t i) {
        const Probe& p = probes[i];
        if (p.t > c.horizon_T) return;
        std::vector<double> b(static_cast<std::size_t>(c.dim_d));
        std::vector<double> s(static_cast<std::size_t>(c.dim_d * c.dim_r));
        c.drift(p.f, p.t, p.omega, b.data());
        c.diffusion(p.f, p.t, p.omega, s.data());
        double nb = 0.0, ns = 0.0;
        for (double v : b) nb += v * v;
        for (double v : s) ns += v * v;
        ratio[i] = (std::sqrt(nb) + std::sqrt(ns)) / (1.0 + sup_norm(p.omega, std::min(p.t, p.omega.horizon())));
    });
    GrowthReport rep;
    for (double r : ratio) rep.estimate = std::max(rep.estimate, r);
    rep.pass = rep.estimate <= shared_C + 1e-12;
    return rep;
}

GrowthReport validate_growth(const CoefficientField& c, std::span<const Probe> probes,
                             unsigned threads) {
    return validate_growth_against(c, c.growth_C, probes, threads);
}

std::vector<std::pair<Probe, SampledPath>> make_probe_pairs(std::uint64_t seed,
                                                            std::size_t count, double R,
                                                            double T, int path_knots,
                                                            int action_dim) {
    auto base = make_probe_set(seed, count, R, T, path_knots, action_dim);
    auto alt = make_probe_set(seed ^ 0x9e37u, count, R, T, path_knots, action_dim);
    std::vector<std::pair<Probe, SampledPath>> pairs;
    pairs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (i % 2 == 0) {
            // small perturbation of the same path
            SampledPath q = base[i].omega;
            RngStream rng(seed + 17, i);
            for (auto& v : q.values) v += rng.uniform(-0.2, 0.2);
            pairs.emplace_back(base[i], std::move(q));
        } else {
            pairs.emplace_back(base[i], alt[i].omega);
        }
    }
    return pairs;
}

double validate_path_lipschitz(const CoefficientField& c,
                               std::span<const std::pair<Probe, SampledPath>> pairs,
                               unsigned threads) {
    std::vector<double> ratio(pairs.size(), 0.0);
    parallel_for(pairs.size(), threads, [&](std::size_t i) {
        const Probe& p = pairs[i].first;
        const SampledPath& alt = pairs[i].second;
        if (p.t > c.horizon_T) return;
        double denom = stopped_sup_distance(p.omega, p.t, alt, p.t, p.t);
        if (denom <= 1e-12) return;
        ratio[i] = eval_discrepancy(c, p, alt) / denom;
    });
    double best = 0.0;
    for (double r : ratio) best = std::max(best, r);
    return best;
}

ConvergenceGap compact_convergence_gap(const CoefficientSequence& seq, int n,
                                       std::span<const Probe> probes, unsigned threads) {
    CoefficientField cn = seq.at(n);
    CoefficientField c0 = seq.at(0);
    if (cn.dim_d != c0.dim_d || cn.dim_r != c0.dim_r || cn.action_dim != c0.action_dim ||
        std::abs(cn.horizon_T - c0.horizon_T) > 1e-12)
        throw ValidationError("coefficient sequence: members have mismatched shapes");

    std::vector<double> gb(probes.size(), 0.0), gs(probes.size(), 0.0), gp(probes.size(), 0.0);
    parallel_for(probes.size(), threads, [&](std::size_t i) {
        const Probe& p = probes[i];
        if (p.t > cn.horizon_T) return;
        std::vector<double> b1(static_cast<std::size_t>(cn.dim_d)), b2(b1.size());
        std::vector<double> s1(static_cast<std::size_t>(cn.dim_d * cn.dim_r)), s2(s1.size());
        cn.drift(p.f, p.t, p.omega, b1.data());
        c0.drift(p.f, p.t, p.omega, b2.data());
        cn.diffusion(p.f, p.t, p.omega, s1.data());
        c0.diffusion(p.f, p.t, p.omega, s2.data());
        double db = 0.0, ds = 0.0;
        for (std::size_t k = 0; k < b1.size(); ++k) db += (b1[k] - b2[k]) * (b1[k] - b2[k]);
        for (std::size_t k = 0; k < s1.size(); ++k) ds += (s1[k] - s2[k]) * (s1[k] - s2[k]);
        gb[i] = std::sqrt(db);
        gs[i] = std::sqrt(ds);
        gp[i] = std::abs(cn.terminal(p.omega) - c0.terminal(p.omega));
    });
    ConvergenceGap gap;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        gap.gap_b = std::max(gap.gap_b, gb[i]);
        gap.gap_sigma = std::max(gap.gap_sigma, gs[i]);
        gap.gap_psi = std::max(gap.gap_psi, gp[i]);
    }
    return gap;
}

} // namespace pathhjb
