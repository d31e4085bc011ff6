#pragma once

#include "orbitclt/error.hpp"
#include "orbitclt/serialize.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace orbitclt {

struct RunOptions {
    std::optional<std::uint64_t> seed; // overrides the config's seed
    unsigned workers = 0;
    bool emit_plot_data = false;
    std::string base_dir = "."; // relative system paths resolve here
};

struct CommandOutput {
    std::string command;
    /// (file name, content) pairs, written by the caller.
    std::vector<std::pair<std::string, std::string>> files;
    bool passed = true;
    Json summary;
};

/// Config: {"command": ..., "system": <path or object>, "seed": u64, "plan": {...}}.
CommandOutput run_config(const Json& config, const RunOptions& options);

/// 0 ok, 1 validation failure, 2 config error, 3 budget exceeded.
int exit_code_for(ErrorCode code);

} // namespace orbitclt
