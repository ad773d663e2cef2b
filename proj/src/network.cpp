#include "swarmplan/network.hpp"

#include <stdexcept>

namespace swarmplan {

PlannedTrajectory shift_plan(const PlannedTrajectory& plan, const TimingConfig& timing) {
    const int input_shift = static_cast<int>(timing.T / timing.Ts);   // h_s / H
    const int state_shift = static_cast<int>(timing.T / timing.base_step);

    PlannedTrajectory out;
    out.planned_round = plan.planned_round + 1;

    out.inputs.reserve(plan.inputs.size());
    const Eigen::VectorXd zero_u = Eigen::VectorXd::Zero(plan.inputs.front().size());
    for (std::size_t l = 0; l < plan.inputs.size(); ++l) {
        const std::size_t src = l + static_cast<std::size_t>(input_shift);
        out.inputs.push_back(src < plan.inputs.size() ? plan.inputs[src] : zero_u);
    }

    out.states.reserve(plan.states.size());
    for (std::size_t j = 0; j < plan.states.size(); ++j) {
        const std::size_t src = j + static_cast<std::size_t>(state_shift);
        out.states.push_back(src < plan.states.size() ? plan.states[src] : plan.states.back());
    }
    out.origin_state = out.states.front();
    return out;
}

SwarmBuffer commit_round(const SwarmBuffer& buffer, const TriggerDecision& decision,
                         const std::vector<CommitEntry>& new_plans, const TimingConfig& timing) {
    const std::int64_t k = buffer.current_round;
    for (const auto& entry : new_plans) {
        if (entry.uav < 0 || entry.uav >= buffer.size())
            throw std::invalid_argument("commit_round: UAV index out of range");
        if (!decision.assigns(entry.uav))
            throw std::invalid_argument("commit_round: plan for an unassigned UAV");
    }

    SwarmBuffer next = buffer;
    next.current_round = k + 1;
    for (int i = 0; i < buffer.size(); ++i)
        next.plans[static_cast<std::size_t>(i)] =
            shift_plan(buffer.plans[static_cast<std::size_t>(i)], timing);

    for (const auto& entry : new_plans) {
        if (!entry.plan) continue;  // solve failed, fallback already in place
        if (entry.plan->planned_round != k)
            throw std::invalid_argument("commit_round: plan round mismatch");
        next.plans[static_cast<std::size_t>(entry.uav)] = *entry.plan;
        next.last_replan_round[static_cast<std::size_t>(entry.uav)] = k;
    }
    return next;
}

}  // namespace swarmplan
