#pragma once

#include <optional>

#include "swarmplan/constraints.hpp"
#include "swarmplan/history.hpp"
#include "swarmplan/verify.hpp"

namespace swarmplan {

enum class TriggerKind { Pbt, RoundRobin };

struct MetricsSeries {
    std::vector<double> mean_distance;     // per round boundary, rounds+1 entries
    std::vector<int> arrival_round;        // -1 when never arrived
    std::vector<std::uint8_t> success;     // arrived and stayed
    std::vector<int> replan_count;
    std::vector<std::uint8_t> deadlocked;  // stalled off-target
    double success_rate = 0.0;
    double arrival_tol = 0.05;
};

struct SimConfig {
    LinearModel model;
    TimingConfig timing;
    ScaledGeometry geom;
    CostWeights weights;
    TriggerKind trigger_kind = TriggerKind::Pbt;
    PriorityParams trigger_params;
    int rounds = 60;
    double arrival_tol = 0.05;
    QpSettings qp;
};

struct RunResult {
    RunHistory history;
    MetricsSeries metrics;
    SeparationReport lemma1;
    SeparationReport theorem2;
    TheoremOneReport theorem1;
};

/// Round-(-1) hover plans at the initial positions.
SwarmBuffer initial_plans(const Scenario& scenario, const LinearModel& model,
                          const TimingConfig& timing);

/// Execute the full round loop: trigger, per-UAV assemble+solve (warm
/// started from the shifted plan), commit with fallbacks, metrics; the
/// guarantee checkers run post-hoc when `run_checks` is set.
RunResult run(const Scenario& scenario, const SimConfig& config, bool run_checks = true);

/// Executed position of each UAV at round boundary r (time r*T).
std::vector<Eigen::VectorXd> boundary_states(const RunHistory& history, const TimingConfig& timing,
                                             int boundary);

MetricsSeries compute_metrics(const RunHistory& history, const TimingConfig& timing, int pos_dim,
                              const std::vector<Eigen::VectorXd>& targets, int horizon_rounds,
                              double arrival_tol = 0.05);

}  // namespace swarmplan
