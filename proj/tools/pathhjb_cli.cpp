// Command-line entry point: solve | stability | lipschitz | validate.
// Exit codes: 0 ok, 2 validation refusal, 3 budget refusal, 1 internal error.

#include <CLI11.hpp>

#include "pathhjb/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Dynamic programming and experiments for path-dependent "
                 "Hamilton-Jacobi-Bellman equations under drift and volatility "
                 "uncertainty"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool seed_set = false, threads_set = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file")->required();
        cmd->add_option("--out", out_dir, "output directory (reports land in <out>/<config hash>)");
        cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) { seed_set = true; });
        cmd->add_option("--threads", threads, "worker threads")->each([&](const std::string&) { threads_set = true; });
    };

    CLI::App* solve = app.add_subcommand("solve", "value at the configured query points");
    CLI::App* stability = app.add_subcommand("stability", "per-n sup gaps over a compact test set");
    CLI::App* lipschitz = app.add_subcommand("lipschitz", "value regularity ratios against the path metric");
    CLI::App* validate = app.add_subcommand("validate", "coefficient family checks");
    for (CLI::App* cmd : {solve, stability, lipschitz, validate}) add_common(cmd);

    CLI11_PARSE(app, argc, argv);

    pathhjb::RunOptions opts;
    opts.config_path = config_path;
    opts.out_dir = out_dir;
    if (seed_set) opts.seed_override = seed;
    if (threads_set) opts.threads_override = threads;

    std::string command = app.get_subcommands().front()->get_name();
    return pathhjb::run_command(command, opts);
}
