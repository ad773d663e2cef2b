#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "swarmplan/dynamics.hpp"
#include "swarmplan/trigger.hpp"

namespace swarmplan {

/// The shared many-to-all knowledge state: after every round, all logical
/// participants hold this exact content. `current_round` is the next round
/// to execute; the stored plans were committed in round current_round - 1.
struct SwarmBuffer {
    std::vector<PlannedTrajectory> plans;
    std::vector<std::int64_t> last_replan_round;
    std::int64_t current_round = 0;

    int size() const { return static_cast<int>(plans.size()); }
};

/// Eq. shift reuse: the previous plan advanced by one round, extended past
/// its horizon by the terminal hold with zero input. Pure reindexing; no
/// arithmetic on the stored samples.
PlannedTrajectory shift_plan(const PlannedTrajectory& plan, const TimingConfig& timing);

/// New plan for an assigned UAV, or nullopt when its solve failed and the
/// fallback applies.
struct CommitEntry {
    int uav = 0;
    std::optional<PlannedTrajectory> plan;
};

/// Apply one round's results: assigned UAVs with successful solves take
/// their new plan (last_replan_round = k); everyone else takes the shifted
/// previous plan. Entries for unassigned UAVs are a protocol violation.
SwarmBuffer commit_round(const SwarmBuffer& buffer, const TriggerDecision& decision,
                         const std::vector<CommitEntry>& new_plans, const TimingConfig& timing);

}  // namespace swarmplan
