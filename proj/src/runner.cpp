#include "pathhjb/runner.hpp"

#include <chrono>
#include <cstdio>
#include <thread>

#include <nlohmann/json.hpp>

#include "pathhjb/config.hpp"
#include "pathhjb/errors.hpp"
#include "pathhjb/report_io.hpp"

namespace pathhjb {

namespace {

struct RunContext {
    Json config;
    std::string hash;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string dir; // <out>/<hash>
    std::vector<std::string> outputs;
    std::vector<std::pair<std::string, double>> timings;
};

void emit(RunContext& ctx, const std::string& name, const std::string& content) {
    write_file(ctx.dir + "/" + name, content);
    ctx.outputs.push_back(name);
}

void write_manifest(RunContext& ctx) {
    JsonWriter w;
    w.begin_object();
    w.key_string("config_hash", ctx.hash);
    w.key_uint("seed", ctx.seed);
    w.key_string("artifact_version", kArtifactVersion);
    w.key_int("threads", ctx.threads);
    w.begin_array("outputs");
    for (const auto& o : ctx.outputs) w.array_string(o);
    w.end_array();
    w.begin_array("timings_ms");
    for (const auto& [name, ms] : ctx.timings) {
        w.begin_object_in_array();
        w.key_string("operation", name);
        w.key_number("runtime_ms", ms);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    write_file(ctx.dir + "/run_manifest.json", w.str());
}

class Timer {
public:
    Timer(RunContext& ctx, std::string name)
        : ctx_(ctx), name_(std::move(name)), t0_(std::chrono::steady_clock::now()) {}
    ~Timer() {
        ctx_.timings.emplace_back(
            name_, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_)
                       .count());
    }

private:
    RunContext& ctx_;
    std::string name_;
    std::chrono::steady_clock::time_point t0_;
};

void header(JsonWriter& w, const RunContext& ctx) {
    w.key_string("config_hash", ctx.hash);
    w.key_uint("seed", ctx.seed);
    w.key_string("artifact_version", kArtifactVersion);
}

int cmd_solve(RunContext& ctx) {
    CoefficientField field = field_from_json(require_key(ctx.config, "family"));
    SolverConfig base = solver_from_json(require_key(ctx.config, "solver"), field);
    base.seed = ctx.seed;
    const Json& queries = require_key(ctx.config, "queries");
    if (!queries.is_array() || queries.empty())
        throw ValidationError("config: \"queries\" must be a nonempty array");

    std::size_t qi = 0;
    for (const auto& q : queries) {
        Timer timer(ctx, "solve_query_" + std::to_string(qi));
        SolverConfig cfg = base;
        cfg.start = timed_path_from_json(q);
        ValueEstimate est = solve(field, cfg, ctx.threads);

        JsonWriter w;
        w.begin_object();
        header(w, ctx);
        w.key_int("query", static_cast<std::int64_t>(qi));
        w.key_number("t", cfg.start.t);
        w.key_number("value", est.value);
        w.key_number("stderr", est.stderr_);
        w.key_string("mode", to_string(est.mode));
        w.key_uint("nodes", est.nodes);
        w.key_string("argmax_policy_summary", est.policy_summary);
        w.begin_array("argmax_control");
        for (double cc : est.root_control.coords) w.array_number(cc);
        w.end_array();
        w.key_number("runtime_ms", est.runtime_ms);
        w.end_object();

        char name[64];
        std::snprintf(name, sizeof name, "query_%03zu.json", qi);
        emit(ctx, name, w.str());
        ++qi;
    }
    return 0;
}

int cmd_stability(RunContext& ctx) {
    CoefficientSequence seq = sequence_from_json(require_key(ctx.config, "sequence"));
    CoefficientField limit = seq.at(0);
    SolverConfig cfg = solver_from_json(require_key(ctx.config, "solver"), limit);
    cfg.seed = ctx.seed;
    CompactTestSet test_set =
        test_set_from_json(require_key(ctx.config, "test_set"), limit.horizon_T);
    std::vector<int> n_values;
    for (const auto& n : require_key(ctx.config, "n_values"))
        n_values.push_back(static_cast<int>(n.get<double>()));
    if (n_values.empty()) throw ValidationError("config: empty \"n_values\"");
    StabilityValidationSpec validation = validation_from_json(
        ctx.config.contains("validation") ? ctx.config.at("validation") : Json());

    StabilityReport rep;
    {
        Timer timer(ctx, "run_stability");
        rep = run_stability(seq, test_set, cfg, n_values, validation, ctx.threads);
    }

    std::string csv = csv_row({"n", "gap", "floor", "runtime_ms"});
    for (std::size_t k = 0; k < rep.n_values.size(); ++k)
        csv += csv_row({std::to_string(rep.n_values[k]), fmt_double(rep.gaps[k]),
                        fmt_double(rep.floor_estimate), fmt_double(rep.runtime_ms[k])});
    emit(ctx, "stability_gaps.csv", csv);

    std::string plot = csv_row({"n", "gap"});
    for (std::size_t k = 0; k < rep.n_values.size(); ++k)
        plot += csv_row({std::to_string(rep.n_values[k]), fmt_double(rep.gaps[k])});
    emit(ctx, "plot_gap_vs_n.csv", plot);

    JsonWriter w;
    w.begin_object();
    header(w, ctx);
    w.key_string("solver", rep.solver_description);
    w.key_number("floor_estimate", rep.floor_estimate);
    w.begin_array("n_values");
    for (int n : rep.n_values) w.array_number(n);
    w.end_array();
    w.begin_array("gaps");
    for (double g : rep.gaps) w.array_number(g);
    w.end_array();
    w.begin_array("limit_values");
    for (double v : rep.limit_values) w.array_number(v);
    w.end_array();
    w.begin_array("member_values");
    for (const auto& row : rep.values) {
        w.begin_object_in_array();
        w.begin_array("values");
        for (double v : row) w.array_number(v);
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.end_object();
    emit(ctx, "stability_report.json", w.str());
    return 0;
}

int cmd_lipschitz(RunContext& ctx) {
    CoefficientField field = field_from_json(require_key(ctx.config, "family"));
    SolverConfig cfg = solver_from_json(require_key(ctx.config, "solver"), field);
    cfg.seed = ctx.seed;
    PairSamplerSpec sampler = pairs_from_json(
        ctx.config.contains("pairs") ? ctx.config.at("pairs") : Json());

    LipschitzReport rep;
    {
        Timer timer(ctx, "run_lipschitz");
        rep = run_lipschitz(field, sampler, cfg, ctx.threads);
    }

    std::string csv = csv_row({"pair", "t_a", "t_b", "distance", "value_a", "value_b", "ratio"});
    for (std::size_t i = 0; i < rep.pairs.size(); ++i) {
        const auto& p = rep.pairs[i];
        csv += csv_row({std::to_string(i), fmt_double(p.a.t), fmt_double(p.b.t),
                        fmt_double(p.distance), fmt_double(p.value_a), fmt_double(p.value_b),
                        fmt_double(p.ratio)});
    }
    emit(ctx, "lipschitz_ratios.csv", csv);

    JsonWriter w;
    w.begin_object();
    header(w, ctx);
    w.key_string("family", field.name);
    w.key_number("max_ratio", rep.max_ratio);
    w.key_number("l_budget", rep.l_budget);
    w.key_string("l_budget_formula", rep.l_budget_formula);
    w.key_number("metric_T", rep.metric_T);
    w.key_uint("pairs", rep.pairs.size());
    w.key_uint("skipped", rep.skipped);
    w.key_bool("within_budget", rep.max_ratio <= rep.l_budget);
    w.end_object();
    emit(ctx, "lipschitz_report.json", w.str());

    if (rep.max_ratio > rep.l_budget)
        throw ValidationError("lipschitz: max_ratio " + fmt_double(rep.max_ratio) +
                              " exceeds L budget " + fmt_double(rep.l_budget));
    return 0;
}

int cmd_validate(RunContext& ctx) {
    CoefficientField field = field_from_json(require_key(ctx.config, "family"));
    const Json vj = ctx.config.contains("validation") ? ctx.config.at("validation") : Json();
    StabilityValidationSpec vspec = validation_from_json(vj);

    auto probes = make_probe_set(vspec.probe_seed, vspec.probe_count, vspec.probe_R,
                                 field.horizon_T, 8, field.action_dim);
    auto pairs = make_probe_pairs(vspec.probe_seed ^ 0x99ULL, vspec.probe_count, vspec.probe_R,
                                  field.horizon_T, 8, field.action_dim);

    NonAnticipativityReport na;
    GrowthReport growth;
    double lipschitz_estimate = 0.0;
    {
        Timer timer(ctx, "validate");
        na = validate_nonanticipativity(field, probes, ctx.threads);
        growth = validate_growth(field, probes, ctx.threads);
        lipschitz_estimate = validate_path_lipschitz(field, pairs, ctx.threads);
    }

    JsonWriter w;
    w.begin_object();
    header(w, ctx);
    w.key_string("family", field.name);
    w.key_bool("nonanticipativity_pass", na.pass);
    w.key_number("nonanticipativity_max_discrepancy", na.max_discrepancy);
    w.key_uint("nonanticipativity_failures", na.failures);
    w.key_bool("growth_pass", growth.pass);
    w.key_number("growth_estimate", growth.estimate);
    w.key_number("growth_declared", field.growth_C);
    w.key_number("lipschitz_estimate", lipschitz_estimate);
    w.key_number("lipschitz_declared", field.lipschitz_C);
    w.end_object();
    emit(ctx, "validation_report.json", w.str());

    if (!na.pass)
        throw ValidationError("validation refusal: non-anticipativity violated (" + na.detail + ")");
    if (!growth.pass)
        throw ValidationError("validation refusal: linear growth bound violated (estimate " +
                              fmt_double(growth.estimate) + " > declared " +
                              fmt_double(field.growth_C) + ")");
    return 0;
}

} // namespace

int run_command(const std::string& command, const RunOptions& opts) {
    RunContext ctx;
    try {
        std::string text = read_file(opts.config_path);
        ctx.config = parse_json_text(text);
        ctx.hash = config_hash(canonical_dump(ctx.config));
        ctx.seed = opts.seed_override.value_or(
            ctx.config.contains("seed")
                ? static_cast<std::uint64_t>(ctx.config.at("seed").get<double>())
                : 0ULL);
        unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        ctx.threads = opts.threads_override.value_or(
            ctx.config.contains("threads")
                ? static_cast<unsigned>(ctx.config.at("threads").get<double>())
                : hw);
        if (ctx.threads < 1) ctx.threads = 1;
        ctx.dir = opts.out_dir + "/" + ctx.hash;

        int rc = 0;
        if (command == "solve")
            rc = cmd_solve(ctx);
        else if (command == "stability")
            rc = cmd_stability(ctx);
        else if (command == "lipschitz")
            rc = cmd_lipschitz(ctx);
        else if (command == "validate")
            rc = cmd_validate(ctx);
        else
            throw ValidationError("unknown command '" + command + "'");
        write_manifest(ctx);
        std::fprintf(stdout, "%s: ok, outputs in %s\n", command.c_str(), ctx.dir.c_str());
        return rc;
    } catch (const BudgetError& e) {
        if (!ctx.dir.empty() && !ctx.outputs.empty()) write_manifest(ctx);
        std::fprintf(stderr, "budget refusal: %s\n", e.what());
        return 3;
    } catch (const ValidationError& e) {
        if (!ctx.dir.empty() && !ctx.outputs.empty()) write_manifest(ctx);
        std::fprintf(stderr, "validation refusal: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}

} // namespace pathhjb
