#include "pathhjb/config.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "pathhjb/errors.hpp"

namespace pathhjb {

Json parse_json_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError(std::string("config: malformed JSON: ") + e.what());
    }
}

std::string canonical_dump(const Json& j) { return j.dump(); }

const Json& require_key(const Json& j, const std::string& key) {
    if (!j.is_object() || !j.contains(key))
        throw ValidationError("config: missing \"" + key + "\" key");
    return j.at(key);
}

namespace {

double num(const Json& j, const std::string& key) {
    const Json& v = require_key(j, key);
    if (!v.is_number()) throw ValidationError("config: \"" + key + "\" must be a number");
    return v.get<double>();
}

double num_or(const Json& j, const std::string& key, double fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return num(j, key);
}

std::string str(const Json& j, const std::string& key) {
    const Json& v = require_key(j, key);
    if (!v.is_string()) throw ValidationError("config: \"" + key + "\" must be a string");
    return v.get<std::string>();
}

} // namespace

SampledPath path_from_json(const Json& j) {
    SampledPath p;
    const Json& grid = require_key(j, "grid");
    const Json& values = require_key(j, "values");
    if (!grid.is_array() || !values.is_array() || grid.size() != values.size())
        throw ValidationError("config: path needs equal-length \"grid\" and \"values\" arrays");
    if (values.empty()) throw ValidationError("config: empty path");
    p.dim = static_cast<int>(values.at(0).size());
    for (const auto& t : grid) p.grid.push_back(t.get<double>());
    for (const auto& row : values) {
        if (static_cast<int>(row.size()) != p.dim)
            throw ValidationError("config: ragged path value rows");
        for (const auto& v : row) p.values.push_back(v.get<double>());
    }
    validate_path(p);
    return p;
}

Json path_to_json(const SampledPath& p) {
    Json j;
    j["grid"] = p.grid;
    Json rows = Json::array();
    for (std::size_t k = 0; k < p.knots(); ++k) {
        auto v = p.knot_value(k);
        rows.push_back(std::vector<double>(v.begin(), v.end()));
    }
    j["values"] = rows;
    return j;
}

TimedPath timed_path_from_json(const Json& j) {
    TimedPath tp;
    tp.t = num(j, "t");
    tp.path = path_from_json(require_key(j, "path"));
    validate_timed_path(tp);
    return tp;
}

BoundFn bound_from_json(const Json& j, bool* markovian_kind, double* lipschitz_estimate) {
    std::string kind = str(j, "kind");
    if (markovian_kind) *markovian_kind = (kind == "constant" || kind == "state_affine");
    if (kind == "constant") {
        if (lipschitz_estimate) *lipschitz_estimate = 0.0;
        return bound_constant(num(j, "value"));
    }
    double c0 = num(j, "c0");
    double c1 = num(j, "c1");
    double clip_lo = num(j, "clip_lo");
    double clip_hi = num(j, "clip_hi");
    if (lipschitz_estimate) *lipschitz_estimate = std::abs(c1);
    if (kind == "state_affine") return bound_state_affine(c0, c1, clip_lo, clip_hi);
    if (kind == "running_max") return bound_running_max(c0, c1, clip_lo, clip_hi);
    if (kind == "delayed") return bound_delayed(num(j, "delay"), c0, c1, clip_lo, clip_hi);
    if (kind == "terminal_peek") {
        // deliberately anticipative; exists so the validator has something to catch
        return [c0, c1, clip_lo, clip_hi](double, const SampledPath& w) {
            double x = eval_path1(w, w.horizon());
            return std::min(std::max(c0 + c1 * x, clip_lo), clip_hi);
        };
    }
    throw ValidationError("config: unknown bound kind '" + kind + "'");
}

TerminalSpec terminal_from_json(const Json& j) {
    std::string kind = str(j, "kind");
    if (kind == "constant") return terminal_constant(num(j, "value"));
    if (kind == "identity") return terminal_identity();
    if (kind == "square") return terminal_square();
    if (kind == "abs") return terminal_abs();
    if (kind == "call") return terminal_call(num(j, "strike"));
    if (kind == "clipped_identity") return terminal_clipped_identity(num(j, "cap"));
    if (kind == "clipped_square") return terminal_clipped_square(num(j, "cap"));
    if (kind == "clipped_abs") return terminal_clipped_abs(num(j, "cap"));
    if (kind == "running_max") return terminal_running_max();
    throw ValidationError("config: unknown terminal kind '" + kind + "'");
}

namespace {

struct RandomGParams {
    RandomGSpec spec;
    TerminalSpec terminal;
    double horizon_T = 1.0;
    bool markovian = false;
    double lipschitz_C = 0.0;
};

RandomGParams random_g_params(const Json& params) {
    RandomGParams out;
    bool mk[4];
    double lip[4];
    out.spec.b_lo = bound_from_json(require_key(params, "b_lo"), &mk[0], &lip[0]);
    out.spec.b_hi = bound_from_json(require_key(params, "b_hi"), &mk[1], &lip[1]);
    out.spec.a_lo = bound_from_json(require_key(params, "a_lo"), &mk[2], &lip[2]);
    out.spec.a_hi = bound_from_json(require_key(params, "a_hi"), &mk[3], &lip[3]);
    out.spec.bound_C = num(params, "bound_C");
    out.horizon_T = num_or(params, "horizon_T", 1.0);
    out.terminal = terminal_from_json(require_key(params, "terminal"));
    bool bounds_markovian = mk[0] && mk[1] && mk[2] && mk[3];
    out.markovian = params.contains("markovian") ? params.at("markovian").get<bool>()
                                                 : bounds_markovian;
    // drift: |db| <= |db_lo| + f1(|db_hi| + |db_lo|); diffusion via sqrt slope
    double drift_lip = 2.0 * (lip[0] + lip[1]);
    double sigma_lip = 0.5 * std::sqrt(out.spec.bound_C) * (lip[2] + lip[3]);
    out.lipschitz_C = std::max(drift_lip, sigma_lip);
    return out;
}

CoefficientField field_from_params(const RandomGParams& p, const std::string& name) {
    CoefficientField c = make_random_g(p.spec, p.horizon_T, p.terminal.path, name);
    c.markovian = p.markovian;
    c.terminal_state = p.terminal.state;
    c.terminal_bound_C = p.terminal.bound_C;
    c.terminal_lipschitz_C = p.terminal.lipschitz_C;
    c.lipschitz_C = p.lipschitz_C;
    return c;
}

} // namespace

CoefficientField make_builtin_field(const std::string& name) {
    Json params;
    auto cbound = [](double v) { return Json{{"kind", "constant"}, {"value", v}}; };
    if (name == "drift_const") {
        params = {{"b_lo", cbound(-0.5)},
                  {"b_hi", cbound(0.5)},
                  {"a_lo", cbound(1.0)},
                  {"a_hi", cbound(1.0)},
                  {"bound_C", 2.0},
                  {"horizon_T", 1.0},
                  {"terminal", {{"kind", "clipped_identity"}, {"cap", 3.0}}}};
    } else if (name == "vol_state_affine") {
        params = {{"b_lo", cbound(0.0)},
                  {"b_hi", cbound(0.0)},
                  {"a_lo", cbound(1.0)},
                  {"a_hi",
                   {{"kind", "state_affine"}, {"c0", 1.4}, {"c1", 0.25}, {"clip_lo", 1.0}, {"clip_hi", 2.0}}},
                  {"bound_C", 2.5},
                  {"horizon_T", 1.0},
                  {"terminal", {{"kind", "clipped_square"}, {"cap", 9.0}}}};
    } else if (name == "drift_running_max") {
        params = {{"b_lo", cbound(0.0)},
                  {"b_hi",
                   {{"kind", "running_max"}, {"c0", 0.0}, {"c1", 0.3}, {"clip_lo", 0.0}, {"clip_hi", 1.0}}},
                  {"a_lo", cbound(1.0)},
                  {"a_hi", cbound(1.0)},
                  {"bound_C", 2.0},
                  {"horizon_T", 1.0},
                  {"terminal", {{"kind", "clipped_identity"}, {"cap", 3.0}}}};
    } else if (name == "vol_delayed") {
        params = {{"b_lo", cbound(0.0)},
                  {"b_hi", cbound(0.0)},
                  {"a_lo", cbound(1.0)},
                  {"a_hi",
                   {{"kind", "delayed"}, {"delay", 0.25}, {"c0", 1.0}, {"c1", 0.5}, {"clip_lo", 1.0}, {"clip_hi", 2.0}}},
                  {"bound_C", 2.5},
                  {"horizon_T", 1.0},
                  {"terminal", {{"kind", "clipped_abs"}, {"cap", 3.0}}}};
    } else {
        throw ValidationError("config: unknown builtin family '" + name + "'");
    }
    auto p = random_g_params(params);
    return field_from_params(p, "builtin:" + name);
}

CoefficientField field_from_json(const Json& j) {
    std::string family = str(j, "family");
    if (family.rfind("builtin:", 0) == 0) return make_builtin_field(family.substr(8));
    if (family == "random_g") {
        auto p = random_g_params(require_key(j, "params"));
        return field_from_params(p, "random_g");
    }
    throw ValidationError("config: unknown family '" + family + "'");
}

CoefficientSequence sequence_from_json(const Json& j) {
    std::string kind = str(j, "kind");
    const Json base_json = require_key(j, "base");
    double scale = num_or(j, "scale", 1.0);

    if (kind == "constant") {
        return CoefficientSequence{[base_json](int) {
            auto p = random_g_params(base_json);
            return field_from_params(p, "seq_constant");
        }};
    }
    if (kind == "a_hi_shift" || kind == "b_shift" || kind == "b_hi_cos" || kind == "psi_sin") {
        return CoefficientSequence{[base_json, kind, scale](int n) {
            auto p = random_g_params(base_json);
            double eps = (n == 0) ? 0.0 : scale / static_cast<double>(n);
            if (kind == "a_hi_shift") {
                BoundFn inner = p.spec.a_hi;
                p.spec.a_hi = [inner, eps](double t, const SampledPath& w) {
                    return inner(t, w) + eps;
                };
                p.spec.bound_C += scale; // keep the declared envelope valid for every n
            } else if (kind == "b_shift") {
                BoundFn lo = p.spec.b_lo, hi = p.spec.b_hi;
                p.spec.b_lo = [lo, eps](double t, const SampledPath& w) { return lo(t, w) + eps; };
                p.spec.b_hi = [hi, eps](double t, const SampledPath& w) { return hi(t, w) + eps; };
                p.spec.bound_C += scale;
            } else if (kind == "b_hi_cos") {
                BoundFn hi = p.spec.b_hi;
                p.spec.b_hi = [hi, eps](double t, const SampledPath& w) {
                    double x = eval_path1(w, std::min(t, w.horizon()));
                    return hi(t, w) + eps * std::cos(x);
                };
                p.spec.bound_C += scale;
                p.lipschitz_C += 2.0 * scale;
            } else { // psi_sin
                TerminalFn inner = p.terminal.path;
                p.terminal.path = [inner, eps](const SampledPath& w) {
                    return inner(w) + eps * std::sin(eval_path1(w, w.horizon()));
                };
                if (p.terminal.state) {
                    auto istate = p.terminal.state;
                    p.terminal.state = [istate, eps](double x) { return istate(x) + eps * std::sin(x); };
                }
                if (p.terminal.bound_C >= 0.0) p.terminal.bound_C += scale;
                if (p.terminal.lipschitz_C >= 0.0) p.terminal.lipschitz_C += scale;
            }
            return field_from_params(p, "seq_" + kind + "_n" + std::to_string(n));
        }};
    }
    throw ValidationError("config: unknown sequence kind '" + kind + "'");
}

SolverConfig solver_from_json(const Json& j, const CoefficientField& c) {
    SolverConfig cfg;
    cfg.mode = solver_mode_from_string(str(j, "mode"));
    cfg.steps = static_cast<int>(num(j, "steps"));
    std::string quad = j.contains("quadrature") ? str(j, "quadrature") : std::string("binary");
    cfg.quad = make_quadrature(quad, c.dim_r);
    if (j.contains("control_res")) {
        const Json& cr = j.at("control_res");
        if (cr.is_number()) {
            cfg.control_res.assign(static_cast<std::size_t>(c.action_dim),
                                   static_cast<int>(cr.get<double>()));
        } else if (cr.is_array()) {
            cfg.control_res.clear();
            for (const auto& v : cr) cfg.control_res.push_back(static_cast<int>(v.get<double>()));
        } else {
            throw ValidationError("config: \"control_res\" must be a number or array");
        }
    } else {
        cfg.control_res.assign(static_cast<std::size_t>(c.action_dim), 2);
    }
    cfg.budget_tree_nodes = num_or(j, "budget_nodes", cfg.budget_tree_nodes);
    cfg.budget_strategies = num_or(j, "budget_strategies", cfg.budget_strategies);
    if (j.contains("state_grid")) {
        const Json& g = j.at("state_grid");
        cfg.state_grid.lo = num(g, "lo");
        cfg.state_grid.hi = num(g, "hi");
        cfg.state_grid.dx = num(g, "dx");
    }
    cfg.n_paths = static_cast<int>(num_or(j, "n_paths", cfg.n_paths));
    return cfg;
}

CompactTestSet test_set_from_json(const Json& j, double horizon_T) {
    if (j.contains("points")) {
        CompactTestSet set;
        set.horizon_T = horizon_T;
        set.bound_R = num_or(j, "R", 1.0);
        for (const auto& p : j.at("points")) set.points.push_back(timed_path_from_json(p));
        return set;
    }
    std::string kind = str(j, "kind");
    if (kind != "builtin") throw ValidationError("config: unknown test_set kind '" + kind + "'");
    return make_builtin_test_set(static_cast<std::uint64_t>(num_or(j, "seed", 11.0)),
                                 static_cast<std::size_t>(num_or(j, "count", 12.0)),
                                 num_or(j, "R", 2.0), horizon_T);
}

StabilityValidationSpec validation_from_json(const Json& j) {
    StabilityValidationSpec v;
    if (!j.is_object()) return v;
    v.shared_growth_C = num_or(j, "shared_growth_C", 0.0);
    v.psi_bound_C = num_or(j, "psi_bound_C", 0.0);
    v.probe_seed = static_cast<std::uint64_t>(num_or(j, "probe_seed", 404.0));
    v.probe_count = static_cast<std::size_t>(num_or(j, "probes", 128.0));
    v.probe_R = num_or(j, "probe_R", 4.0);
    return v;
}

PairSamplerSpec pairs_from_json(const Json& j) {
    PairSamplerSpec p;
    if (!j.is_object()) return p;
    p.seed = static_cast<std::uint64_t>(num_or(j, "seed", 7.0));
    p.count = static_cast<std::size_t>(num_or(j, "count", 200.0));
    p.R = num_or(j, "R", 2.0);
    p.path_knots = static_cast<int>(num_or(j, "path_knots", 8.0));
    return p;
}

} // namespace pathhjb
