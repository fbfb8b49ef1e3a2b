#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace pathhjb {

struct RunOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed_override;
    std::optional<unsigned> threads_override;
};

/// Exit-code contract shared by every subcommand:
///   0 success, 2 validation refusal (including malformed configs),
///   3 budget refusal, 1 internal error.
int run_command(const std::string& command, const RunOptions& opts);

} // namespace pathhjb
