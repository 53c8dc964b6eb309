#pragma once

#include <string>

#include "logitac/config.hpp"

namespace logitac {

// Stable CLI exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitRunError = 2,
    kExitConfigOrIo = 3,
    kExitSolverFailed = 4,
    kExitValidationFailed = 5,
};

// Env-controlled stderr logging (LOGITAC_LOG = quiet | info | debug).
void log_info(const std::string& message);
void log_debug(const std::string& message);

// One JSONL per seed (run_seed<seed>.jsonl) plus summary.json with per-seed
// final BL distance, residuals and pass/fail against the config thresholds.
int cmd_run(const ExperimentConfig& config, const std::string& output_dir);

// equilibrium.json with the deduplicated components; exit kExitSolverFailed
// when any restart hit max_iter.
int cmd_equilibrium(const ExperimentConfig& config, const std::string& output_dir);

// trajectory.jsonl plus dynamics_summary.json with the monotonicity verdict.
int cmd_dynamics(const ExperimentConfig& config, const std::string& output_dir);

// Prints the potential-property report; exit kExitValidationFailed on failure.
int cmd_validate_game(const ExperimentConfig& config);

}  // namespace logitac
