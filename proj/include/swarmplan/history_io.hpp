#pragma once

#include <string>

#include "swarmplan/config.hpp"
#include "swarmplan/history.hpp"

namespace swarmplan {

/// Line-delimited round log: one meta record (config + scenario), then one
/// record per round with the trigger decision, per-UAV outcome/status and
/// the replanned inputs. Buffers are reconstructed on load by replaying the
/// shift/commit rules, which reproduces them exactly.
void write_history(const std::string& path, const RunConfig& config, const RunHistory& history);

struct LoadedHistory {
    RunConfig config;
    RunHistory history;
};

LoadedHistory load_history(const std::string& path);

}  // namespace swarmplan
