#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pathhjb/coefficients.hpp"
#include "pathhjb/solver.hpp"

namespace pathhjb {

/// Finite family of timed paths with a declared sup-norm bound; the
/// computable surrogate for a compact subset of time-path space.
struct CompactTestSet {
    std::vector<TimedPath> points;
    double bound_R = 1.0;
    double horizon_T = 1.0;
};

/// Mix of constants, scaled hats and clamped random walks on [0, T], all with
/// sup norm <= R. points[0] is always (t = 0, constant 0) and a spread of
/// current times is included. Deterministic given the seed.
CompactTestSet make_builtin_test_set(std::uint64_t seed, std::size_t count, double R,
                                     double T);

struct StabilityReport {
    std::vector<int> n_values;
    std::vector<double> gaps;                ///< sup over the test set of |v^n - v^0|
    double floor_estimate = 0.0;             ///< member 0 re-solved at doubled steps
    std::vector<double> limit_values;        ///< v^0 per test point
    std::vector<std::vector<double>> values; ///< per n, per test point
    std::vector<double> runtime_ms;          ///< per n
    std::string solver_description;
};

struct StabilityValidationSpec {
    double shared_growth_C = 0.0; ///< <= 0 disables the growth check
    double psi_bound_C = 0.0;     ///< <= 0 disables the terminal bound check
    std::uint64_t probe_seed = 404;
    std::size_t probe_count = 128;
    double probe_R = 4.0;
};

/// Solves every sequence member at every test point with one shared solver
/// config and reports the per-n sup gaps. Members failing the shared growth
/// or terminal-bound validation cause a refusal before any solve runs.
StabilityReport run_stability(const CoefficientSequence& seq,
                              const CompactTestSet& test_set, const SolverConfig& cfg,
                              std::span<const int> n_values,
                              const StabilityValidationSpec& validation,
                              unsigned threads = 1);

struct LipschitzPair {
    TimedPath a, b;
    double value_a = 0.0, value_b = 0.0;
    double distance = 0.0; ///< metric_d
    double ratio = 0.0;
};

struct LipschitzReport {
    std::vector<LipschitzPair> pairs;
    double max_ratio = 0.0;
    double metric_T = 1.0;
    std::size_t skipped = 0; ///< pairs with metric_d below threshold
    double l_budget = 0.0;
    std::string l_budget_formula;
};

struct PairSamplerSpec {
    std::uint64_t seed = 7;
    std::size_t count = 200;
    double R = 2.0;
    int path_knots = 8;
};

/// Budget assembled from the declared constants:
///   L = L_psi * (1 + 2*C*sqrt(T+1)) * exp((2*C + C^2) * T),  C = max(growth, lipschitz)
double lipschitz_budget(const CoefficientField& c, std::string* formula = nullptr);

/// Samples pairs varying time, path or both; computes the value at both
/// points with the shared solver config and reports the ratio statistics.
LipschitzReport run_lipschitz(const CoefficientField& c, const PairSamplerSpec& sampler,
                              const SolverConfig& cfg, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Independent finite-difference oracle (d = 1, Markovian): explicit monotone
// upwind scheme for  w_t + sup_f [ b w_x + 1/2 sigma^2 w_xx ] = 0  backward
// from w(T, .) = psi.

struct FdGridSpec {
    StateGridSpec grid;
    double dt_target = 0.01; ///< reduced automatically when the CFL bound is smaller
    double cfl_number = 0.9;
    int control_res = 2;
    std::size_t keep_layers = 201; ///< stored time layers (thinned uniformly)
};

struct FdTable {
    std::vector<double> times;               ///< kept layer times, ascending
    StateGridSpec grid;
    std::vector<std::vector<double>> layers; ///< per kept time, per state
    std::uint64_t steps_taken = 0;
    std::uint64_t cfl_reductions = 0;        ///< steps where dt_target had to shrink
};

FdTable fd_oracle_markovian(const CoefficientField& c,
                            const std::function<double(double)>& psi_state,
                            const FdGridSpec& spec);

/// Table lookup with quadratic interpolation in x and linear in t.
double fd_table_value(const FdTable& table, double t, double x);

struct ResidualStats {
    double max_abs = 0.0;
    std::size_t probes = 0;
};

/// Evaluates the equation residual of the (smoothly interpolated) table at
/// interior probe points, routed through the test-function calculus.
ResidualStats residual_probe(const CoefficientField& c, const FdTable& table,
                             std::span<const std::pair<double, double>> probe_points,
                             int control_grid_res = 9);

} // namespace pathhjb
