#pragma once

#include "spinkin/config.hpp"
#include "spinkin/io.hpp"

#include <map>
#include <string>

namespace spinkin::runner {

struct RunResult {
    bool ok = true;
    std::string message;  ///< guard message when a step was rejected
    std::string directory;
    std::size_t steps_done = 0;
    io::DiagnosticsSeries series{std::vector<std::string>{}};
    /// Scenario measurements, e.g. omega_fit and omega_expected.
    std::map<std::string, double> summary;
};

/// Runs the configured backend loop and writes config.json, run.json, diagnostics.csv and snapshots
/// into cfg.output_dir. A rejected step ends the run with ok = false after saving the last valid state.
RunResult run_case(const RunConfig& cfg);

/// Same loop without touching the file system.
RunResult run_in_memory(const RunConfig& cfg);

}  // namespace spinkin::runner
