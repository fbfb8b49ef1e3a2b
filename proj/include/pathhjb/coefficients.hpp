#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pathhjb/path.hpp"

namespace pathhjb {

/// A point of the action set F = [0,1]^m, optionally carrying the grid index
/// it was drawn from (used for deterministic tie breaking).
struct ControlPoint {
    std::vector<double> coords;
    std::vector<int> index; // empty when the point is not a grid point

    double operator[](std::size_t i) const { return coords[i]; }
};

/// Uniform per-axis grid on the unit box. Axis resolution 1 collapses the
/// axis to coordinate 0 (used for degenerate action axes); resolution k >= 2
/// places points at i/(k-1), so interval endpoints are always on the grid.
struct ControlGrid {
    std::vector<int> res;

    std::size_t size() const;
    ControlPoint point(std::size_t flat) const; // flat index, lexicographic
};

ControlGrid make_control_grid(std::vector<int> res);

using BoundFn = std::function<double(double t, const SampledPath&)>;
using TerminalFn = std::function<double(const SampledPath&)>;

/// Non-anticipative drift/diffusion/terminal evaluators with declared
/// growth and Lipschitz metadata. Evaluators must be pure: they are called
/// concurrently from worker threads.
struct CoefficientField {
    int dim_d = 1;      ///< state dimension
    int dim_r = 1;      ///< shock dimension
    int action_dim = 2; ///< m
    double horizon_T = 1.0;

    double growth_C = 0.0;             ///< declared linear growth constant
    double lipschitz_C = -1.0;         ///< declared path-Lipschitz constant, < 0 if undeclared
    double terminal_bound_C = -1.0;    ///< declared |psi| bound, < 0 if undeclared
    double terminal_lipschitz_C = -1.0;
    bool markovian = false;            ///< evaluators read only t and the current state

    std::function<void(const ControlPoint&, double, const SampledPath&, double*)> drift;     // d out
    std::function<void(const ControlPoint&, double, const SampledPath&, double*)> diffusion; // d*r out
    TerminalFn terminal;
    std::function<double(double)> terminal_state; // set when psi factors through the final state (d=1)

    std::string name;

    struct IntervalBounds { // present for interval-uncertainty families
        BoundFn b_lo, b_hi, a_lo, a_hi;
        double bound_C = 1.0;
    };
    std::shared_ptr<const IntervalBounds> bounds; // null otherwise
};

/// Drift/variance interval bounds defining a one-dimensional uncertainty
/// family: drift ranges over [b_lo, b_hi], variance over [a_lo, a_hi].
struct RandomGSpec {
    BoundFn b_lo, b_hi, a_lo, a_hi;
    double bound_C = 1.0; ///< |b| <= C, 1/C <= a <= C on probes
};

/// d = r = 1, m = 2 field: drift(f) = b_lo + f1*(b_hi - b_lo),
/// diffusion(f) = sqrt(a_lo + f2*(a_hi - a_lo)). Probes the spec invariants
/// at construction and throws ValidationError on a violation.
CoefficientField make_random_g(const RandomGSpec& spec, double horizon_T,
                               TerminalFn terminal, std::string name = "random_g");

/// Integer-indexed family of fields; member 0 is the limit object.
struct CoefficientSequence {
    std::function<CoefficientField(int)> at;
};

// ---------------------------------------------------------------------------
// Built-in bound evaluators (all 1d). Affine kinds clip into [clip_lo, clip_hi]
// to stay bounded; clipping preserves the Lipschitz constant.
BoundFn bound_constant(double value);
BoundFn bound_state_affine(double c0, double c1, double clip_lo, double clip_hi);
BoundFn bound_running_max(double c0, double c1, double clip_lo, double clip_hi);
BoundFn bound_delayed(double delay, double c0, double c1, double clip_lo, double clip_hi);

/// Terminal functionals; `state` is non-null when psi factors through omega(T).
struct TerminalSpec {
    TerminalFn path;
    std::function<double(double)> state;
    double bound_C = -1.0;
    double lipschitz_C = -1.0;
};
TerminalSpec terminal_constant(double c);
TerminalSpec terminal_identity();
TerminalSpec terminal_square();
TerminalSpec terminal_abs();
TerminalSpec terminal_call(double strike);
TerminalSpec terminal_clipped_identity(double cap);
TerminalSpec terminal_clipped_square(double cap);
TerminalSpec terminal_clipped_abs(double cap);
TerminalSpec terminal_running_max(); // max over knots; path-dependent

// ---------------------------------------------------------------------------
// Validators. The conditions quantify over infinite sets; these check them on
// finite probe families, deterministic given the seed.

struct Probe {
    ControlPoint f;
    double t = 0.0;
    SampledPath omega;
};

/// Random probes: bounded-increment walk paths with |omega| <= R, times in
/// [0, T], actions on a coarse control grid.
std::vector<Probe> make_probe_set(std::uint64_t seed, std::size_t count, double R,
                                  double T, int path_knots, int action_dim);

struct NonAnticipativityReport {
    double max_discrepancy = 0.0;
    bool pass = true;
    std::size_t failures = 0;
    std::string detail; // first failing probe, if any
};

/// Re-evaluates each probe on a tail-perturbed copy of its path (values
/// strictly after t shifted by a bump) and reports the largest discrepancy.
NonAnticipativityReport validate_nonanticipativity(const CoefficientField& c,
                                                   std::span<const Probe> probes,
                                                   unsigned threads = 1,
                                                   double bump = 0.7355031);

struct GrowthReport {
    double estimate = 0.0; ///< max over probes of (|b| + |sigma|) / (1 + sup norm)
    bool pass = true;      ///< estimate <= declared growth_C
};
GrowthReport validate_growth(const CoefficientField& c, std::span<const Probe> probes,
                             unsigned threads = 1);
GrowthReport validate_growth_against(const CoefficientField& c, double shared_C,
                                     std::span<const Probe> probes, unsigned threads = 1);

/// Max over probe pairs of coefficient discrepancy over path sup distance.
/// Pairs with sup distance below 1e-12 are skipped.
double validate_path_lipschitz(const CoefficientField& c,
                               std::span<const std::pair<Probe, SampledPath>> pairs,
                               unsigned threads = 1);
std::vector<std::pair<Probe, SampledPath>> make_probe_pairs(std::uint64_t seed,
                                                            std::size_t count, double R,
                                                            double T, int path_knots,
                                                            int action_dim);

struct ConvergenceGap {
    double gap_b = 0.0;
    double gap_sigma = 0.0;
    double gap_psi = 0.0;
};

/// Sup discrepancies between member n and member 0 over the probe set.
ConvergenceGap compact_convergence_gap(const CoefficientSequence& seq, int n,
                                       std::span<const Probe> probes,
                                       unsigned threads = 1);

} // namespace pathhjb
