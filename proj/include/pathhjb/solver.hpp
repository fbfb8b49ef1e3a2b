#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pathhjb/coefficients.hpp"
#include "pathhjb/path.hpp"
#include "pathhjb/quadrature.hpp"

namespace pathhjb {

enum class SolverMode { tree, markovian, montecarlo, exhaustive };

std::string to_string(SolverMode m);
SolverMode solver_mode_from_string(const std::string& s);

/// Uniform state grid for the recombining solver and the FD oracle.
struct StateGridSpec {
    double lo = -6.0;
    double hi = 6.0;
    double dx = 0.02;

    std::size_t states() const;
    double state(std::size_t i) const { return lo + static_cast<double>(i) * dx; }
};

struct SolverConfig {
    SolverMode mode = SolverMode::tree;
    int steps = 1;
    QuadratureRule quad;
    std::vector<int> control_res = {2, 2};
    TimedPath start;

    double budget_tree_nodes = 6.7e7;   ///< refusal above this many node visits
    double budget_strategies = 1e6;     ///< exhaustive enumeration cap
    StateGridSpec state_grid;           ///< markovian mode
    int n_paths = 4096;                 ///< montecarlo mode
    std::uint64_t seed = 0;
};

/// Checks quadrature moments, start path validity and step/grid sanity
/// against the field; throws ValidationError on any violation.
void validate_solver_config(const SolverConfig& cfg, const CoefficientField& c);

struct ValueEstimate {
    double value = 0.0;
    double stderr_ = 0.0; ///< 0 for the exact modes
    SolverMode mode = SolverMode::tree;
    std::uint64_t nodes = 0;
    double runtime_ms = 0.0;
    ControlPoint root_control;
    std::string policy_summary;
};

/// Fully materialized controlled path tree; children of a node are ordered
/// control-major, then by shock lexicographic order.
struct ValueTree {
    struct Node {
        SampledPath prefix;
        double value = 0.0;
        ControlPoint argmax;
    };
    std::vector<std::vector<Node>> levels; ///< levels[0] is the start node
    std::size_t branching = 0;             ///< grid points * quadrature nodes
};

/// Backward dynamic programming on the non-recombining path tree. Controls
/// are feedback: one choice per node, quadrature children averaged per
/// control candidate.
ValueEstimate solve_tree(const CoefficientField& c, const SolverConfig& cfg,
                         unsigned threads = 1);

/// Same recursion, returning the whole tree. Only for instances within a
/// small node budget; used for post-hoc invariant checks.
ValueTree solve_tree_full(const CoefficientField& c, const SolverConfig& cfg);

/// Re-verifies the ValueTree invariants (leaves equal the terminal functional,
/// interior values equal the control-max of quadrature averages). Returns the
/// largest absolute defect.
double recheck_value_tree(const CoefficientField& c, const SolverConfig& cfg,
                          const ValueTree& tree);

/// Brute-force oracle: enumerates every feedback strategy (one control grid
/// point per shock-history node) and evaluates its expected payoff exactly.
ValueEstimate solve_exhaustive(const CoefficientField& c, const SolverConfig& cfg);

/// Recombining state-grid solver for Markovian fields whose terminal
/// functional factors through the final state. Interior layers step through
/// the moment-matched three-point projection (see kernels.hpp); the terminal
/// and the start transitions evaluate exactly, so a one-step instance matches
/// solve_tree.
ValueEstimate solve_markovian(const CoefficientField& c, const SolverConfig& cfg);

/// Feedback rule for the Monte Carlo lower bound: sees the step index, the
/// current time, the current state and the running max of |state|.
struct FeedbackPolicy {
    std::string name;
    std::function<ControlPoint(int step, double t, std::span<const double> state,
                               double running_max_norm)>
        choose;
};

/// Constant policies for every grid point, plus bang-bang threshold rules on
/// the current state and on the running max.
std::vector<FeedbackPolicy> make_policy_class(const ControlGrid& grid,
                                              std::span<const double> thresholds);

/// Simulates Euler paths under each policy with common random numbers and
/// returns the best sample mean with its standard error. A lower-bound
/// estimate: it cannot beat solve_tree beyond sampling noise.
ValueEstimate solve_montecarlo(const CoefficientField& c, const SolverConfig& cfg,
                               std::span<const FeedbackPolicy> policies, int n_paths,
                               std::uint64_t seed, unsigned threads = 1);

/// Mode dispatch used by the CLI.
ValueEstimate solve(const CoefficientField& c, const SolverConfig& cfg,
                    unsigned threads = 1);

// Shared helpers -----------------------------------------------------------

/// Knots of p strictly before t plus a knot at t; the prefix every tree node
/// path starts from. Appending the evolved segment to this prefix agrees
/// with concat(p, t, segment).
SampledPath dp_prefix(const SampledPath& p, double t);

/// Expected value anchored at the first entry: exact when all entries agree.
double anchored_average(std::span<const double> values, std::span<const double> weights);

} // namespace pathhjb
