#include "swarmplan/sim.hpp"

#include <algorithm>
#include <cmath>

namespace swarmplan {

SwarmBuffer initial_plans(const Scenario& scenario, const LinearModel& model,
                          const TimingConfig& timing) {
    SwarmBuffer buffer;
    buffer.current_round = 0;
    buffer.plans.reserve(static_cast<std::size_t>(scenario.N));
    buffer.last_replan_round.assign(static_cast<std::size_t>(scenario.N), -1);
    for (const auto& x0 : scenario.initial_states)
        buffer.plans.push_back(hover_plan(model, timing, -1, x0));
    return buffer;
}

std::vector<Eigen::VectorXd> boundary_states(const RunHistory& history, const TimingConfig& timing,
                                             int boundary) {
    // The state at time r*T is the activation sample of the buffer committed
    // in round r-1 (the initial buffer for r = 0).
    const SwarmBuffer& buffer =
        boundary == 0 ? history.initial_buffer
                      : history.rounds[static_cast<std::size_t>(boundary - 1)].buffer_after;
    std::vector<Eigen::VectorXd> out;
    out.reserve(buffer.plans.size());
    for (const auto& plan : buffer.plans) out.push_back(plan.states.front());
    return out;
}

MetricsSeries compute_metrics(const RunHistory& history, const TimingConfig& timing, int pos_dim,
                              const std::vector<Eigen::VectorXd>& targets, int horizon_rounds,
                              double arrival_tol) {
    const int N = static_cast<int>(targets.size());
    const int boundaries = static_cast<int>(history.rounds.size()) + 1;

    MetricsSeries m;
    m.arrival_tol = arrival_tol;
    m.mean_distance.resize(static_cast<std::size_t>(boundaries));
    m.arrival_round.assign(static_cast<std::size_t>(N), -1);
    m.success.assign(static_cast<std::size_t>(N), 0);
    m.replan_count.assign(static_cast<std::size_t>(N), 0);
    m.deadlocked.assign(static_cast<std::size_t>(N), 0);

    std::vector<std::vector<double>> dist(static_cast<std::size_t>(N));
    for (int r = 0; r < boundaries; ++r) {
        const auto states = boundary_states(history, timing, r);
        double sum = 0.0;
        for (int i = 0; i < N; ++i) {
            const double di =
                (states[static_cast<std::size_t>(i)].head(pos_dim) - targets[static_cast<std::size_t>(i)])
                    .norm();
            dist[static_cast<std::size_t>(i)].push_back(di);
            sum += di;
        }
        m.mean_distance[static_cast<std::size_t>(r)] = sum / N;
    }

    for (const RoundRecord& rec : history.rounds)
        for (const auto& [cu, uav] : rec.decision.assignment)
            if (rec.outcome[static_cast<std::size_t>(uav)] == SolveOutcome::Replanned)
                ++m.replan_count[static_cast<std::size_t>(uav)];

    int successes = 0;
    for (int i = 0; i < N; ++i) {
        const auto& di = dist[static_cast<std::size_t>(i)];
        // Arrival: first boundary within tol that is never left beyond 2*tol.
        int arrival = -1;
        for (int r = 0; r < boundaries; ++r) {
            if (di[static_cast<std::size_t>(r)] > arrival_tol) continue;
            bool holds = true;
            for (int s = r + 1; s < boundaries; ++s) {
                if (di[static_cast<std::size_t>(s)] > 2.0 * arrival_tol) {
                    holds = false;
                    break;
                }
            }
            if (holds) {
                arrival = r;
                break;
            }
        }
        m.arrival_round[static_cast<std::size_t>(i)] = arrival;
        if (arrival >= 0) {
            m.success[static_cast<std::size_t>(i)] = 1;
            ++successes;
        } else if (boundaries > 3 * horizon_rounds) {
            // Deadlock surrogate: no progress over the last 3H rounds while
            // off-target.
            const double tail = di.back();
            const double before = di[static_cast<std::size_t>(boundaries - 1 - 3 * horizon_rounds)];
            if (tail > arrival_tol && before - tail < arrival_tol)
                m.deadlocked[static_cast<std::size_t>(i)] = 1;
        }
    }
    m.success_rate = N > 0 ? static_cast<double>(successes) / N : 1.0;
    return m;
}

RunResult run(const Scenario& scenario, const SimConfig& config, bool run_checks) {
    const LinearModel& model = config.model;
    const TimingConfig& timing = config.timing;
    const int n = model.state_dim();
    const int d = model.pos_dim;
    const int N = scenario.N;
    const int M = scenario.M;

    const Condenser condenser(model, timing);

    RunResult result;
    result.history.scenario = scenario;
    result.history.initial_buffer = initial_plans(scenario, model, timing);
    result.history.rounds.reserve(static_cast<std::size_t>(config.rounds));

    std::vector<Eigen::VectorXd> full_targets(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        Eigen::VectorXd xt = Eigen::VectorXd::Zero(n);
        xt.head(d) = scenario.targets[static_cast<std::size_t>(i)];
        full_targets[static_cast<std::size_t>(i)] = std::move(xt);
    }

    SwarmBuffer buffer = result.history.initial_buffer;
    for (int k = 0; k < config.rounds; ++k) {
        TriggerDecision decision;
        if (config.trigger_kind == TriggerKind::Pbt) {
            const auto prio = priorities(buffer, scenario.targets, config.trigger_params, timing, k);
            decision = select_pbt(prio, M);
        } else {
            decision = select_round_robin(k, N, M);
        }

        RoundRecord rec;
        rec.round = k;
        rec.decision = decision;
        rec.outcome.assign(static_cast<std::size_t>(N), SolveOutcome::NotAssigned);
        rec.solver_status.assign(static_cast<std::size_t>(N), QpStatus::MaxIterations);

        std::vector<CommitEntry> entries;
        entries.reserve(decision.assignment.size());
        for (const auto& [cu, uav] : decision.assignment) {
            const PlannedTrajectory& prev = buffer.plans[static_cast<std::size_t>(uav)];
            const PlannedTrajectory shifted = shift_plan(prev, timing);

            CommitEntry entry;
            entry.uav = uav;
            try {
                const QpProblem qp = assemble_qp(uav, buffer, model, timing, config.geom,
                                                 config.weights, full_targets[static_cast<std::size_t>(uav)],
                                                 condenser);
                const QpSolution sol = solve(qp, stack_inputs(shifted), config.qp);
                rec.solver_status[static_cast<std::size_t>(uav)] = sol.status;
                // Commit only solutions whose primal feasibility is well below
                // the recursive-feasibility tolerance (1e-9); otherwise the
                // committed plan would seed a slightly infeasible shift next
                // round. The exactly-feasible shifted plan covers the rest.
                constexpr double kCommitFeasTol = 1e-11;
                if (sol.status == QpStatus::Optimal &&
                    check_feasible(qp, sol.primal).max() <= kCommitFeasTol) {
                    std::vector<Eigen::VectorXd> inputs;
                    inputs.reserve(static_cast<std::size_t>(timing.h_s));
                    const int m = model.input_dim();
                    for (int l = 0; l < timing.h_s; ++l)
                        inputs.push_back(sol.primal.segment(l * m, m));
                    entry.plan =
                        make_plan(model, timing, k, evaluate_plan(prev, timing, 2 * timing.T),
                                  std::move(inputs));
                    rec.outcome[static_cast<std::size_t>(uav)] = SolveOutcome::Replanned;
                } else {
                    rec.outcome[static_cast<std::size_t>(uav)] = SolveOutcome::Fallback;
                }
            } catch (const SeparationViolation&) {
                // Broken invariant chain; fall back and let the post-hoc
                // checkers flag the run.
                rec.outcome[static_cast<std::size_t>(uav)] = SolveOutcome::Fallback;
            }
            entries.push_back(std::move(entry));
        }

        buffer = commit_round(buffer, decision, entries, timing);
        rec.buffer_after = buffer;
        result.history.rounds.push_back(std::move(rec));
    }

    result.metrics = compute_metrics(result.history, timing, d, scenario.targets, timing.H,
                                     config.arrival_tol);
    if (run_checks) {
        result.lemma1 = check_lemma1(result.history, config.geom, timing);
        result.theorem2 = check_theorem2(result.history, model, config.geom, timing);
        result.theorem1 =
            check_theorem1(result.history, model, timing, config.geom, config.weights, scenario.targets);
    }
    return result;
}

}  // namespace swarmplan
