#pragma once

#include <cstdint>
#include <vector>

#include "swarmplan/network.hpp"
#include "swarmplan/qp.hpp"
#include "swarmplan/scenario.hpp"
#include "swarmplan/trigger.hpp"

namespace swarmplan {

enum class SolveOutcome : std::uint8_t { NotAssigned, Replanned, Fallback };

/// Everything one round produced: the trigger decision, per-UAV outcome and
/// the buffer after commit.
struct RoundRecord {
    std::int64_t round = 0;
    TriggerDecision decision;
    std::vector<SolveOutcome> outcome;   // per UAV
    std::vector<QpStatus> solver_status; // meaningful where assigned
    SwarmBuffer buffer_after;
};

struct RunHistory {
    Scenario scenario;
    SwarmBuffer initial_buffer;  // round -1 hover plans
    std::vector<RoundRecord> rounds;
};

}  // namespace swarmplan
