#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "pathhjb/coefficients.hpp"
#include "pathhjb/convergence.hpp"
#include "pathhjb/solver.hpp"

namespace pathhjb {

using Json = nlohmann::json;

/// Parses text as JSON; malformed input raises ValidationError with the byte
/// offset from the parser.
Json parse_json_text(const std::string& text);

/// Canonical form (sorted keys, minimal whitespace) used for config hashing.
std::string canonical_dump(const Json& j);

SampledPath path_from_json(const Json& j);
Json path_to_json(const SampledPath& p);
TimedPath timed_path_from_json(const Json& j);

BoundFn bound_from_json(const Json& j, bool* markovian_kind = nullptr,
                        double* lipschitz_estimate = nullptr);
TerminalSpec terminal_from_json(const Json& j);

/// {"family":"random_g","params":{...}} or {"family":"builtin:<name>"}.
CoefficientField field_from_json(const Json& j);
CoefficientField make_builtin_field(const std::string& name);

/// {"kind":"constant"|"a_hi_shift"|"b_shift"|"b_hi_cos"|"psi_sin",
///  "base":{...random_g params...},"scale":s}
CoefficientSequence sequence_from_json(const Json& j);

SolverConfig solver_from_json(const Json& j, const CoefficientField& c);

CompactTestSet test_set_from_json(const Json& j, double horizon_T);

StabilityValidationSpec validation_from_json(const Json& j);

PairSamplerSpec pairs_from_json(const Json& j);

/// Field access helpers that name the missing key in the error.
const Json& require_key(const Json& j, const std::string& key);

} // namespace pathhjb
