#pragma once

#include <string>

#include "swarmplan/config.hpp"

namespace swarmplan {

/// Exit statuses mirrored by the CLI.
enum class RunOutcome : int { Ok = 0, ConfigError = 1, GuaranteeViolation = 2, PackingFailure = 3 };

/// Execute the configured ensemble (optionally both triggers on paired
/// seeds), writing per-run trajectory CSVs, verification summaries, round
/// logs and the ensemble metrics CSV into the output directory.
RunOutcome run_ensemble(const RunConfig& config);

/// Re-run the guarantee checkers on a saved round log.
RunOutcome verify_log(const std::string& history_path);

/// Generate and emit just the scenario file for the configured seed.
RunOutcome emit_scenario(const RunConfig& config);

}  // namespace swarmplan
