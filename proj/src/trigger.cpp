#include "swarmplan/trigger.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "swarmplan/network.hpp"

namespace swarmplan {

void PriorityParams::validate() const {
    if (alpha1 < 0.0 || alpha2 < 0.0 || alpha3 < 0.0)
        throw std::invalid_argument("PriorityParams: weights must be nonnegative");
    if (!(beta > 0.0 && beta < 3.141592653589793))
        throw std::invalid_argument("PriorityParams: beta must be in (0, pi)");
}

Eigen::MatrixXi TriggerDecision::gamma(int M, int N) const {
    Eigen::MatrixXi g = Eigen::MatrixXi::Zero(M, N);
    for (const auto& [cu, uav] : assignment) g(cu, uav) = 1;
    return g;
}

bool TriggerDecision::assigns(int uav) const {
    for (const auto& [cu, u] : assignment)
        if (u == uav) return true;
    return false;
}

void TriggerDecision::validate(int M, int N) const {
    std::vector<bool> cu_seen(static_cast<std::size_t>(M), false);
    std::vector<bool> uav_seen(static_cast<std::size_t>(N), false);
    for (const auto& [cu, uav] : assignment) {
        if (cu < 0 || cu >= M || uav < 0 || uav >= N)
            throw std::invalid_argument("TriggerDecision: index out of range");
        if (cu_seen[cu] || uav_seen[uav])
            throw std::invalid_argument("TriggerDecision: duplicate CU or UAV");
        cu_seen[cu] = true;
        uav_seen[uav] = true;
    }
}

double priority(int uav, const SwarmBuffer& buffer, const std::vector<Eigen::VectorXd>& targets,
                const PriorityParams& params, const TimingConfig& timing, std::int64_t round) {
    const int N = buffer.size();
    const int d = static_cast<int>(targets.at(static_cast<std::size_t>(uav)).size());
    const Ticks probe = 2 * timing.T;

    const Eigen::VectorXd p_i =
        evaluate_plan(buffer.plans[static_cast<std::size_t>(uav)], timing, probe).head(d);
    const Eigen::VectorXd d_target = targets[static_cast<std::size_t>(uav)] - p_i;
    const double dist_target = d_target.norm();

    double cone = 0.0;
    for (int j = 0; j < N; ++j) {  // ascending index order, fixed for determinism
        if (j == uav) continue;
        const Eigen::VectorXd p_j =
            evaluate_plan(buffer.plans[static_cast<std::size_t>(j)], timing, probe).head(d);
        const Eigen::VectorXd d_ij = p_j - p_i;
        const double dist_ij = d_ij.norm();
        const double xi = std::max(0.0, dist_target - dist_ij);
        if (xi == 0.0 || dist_target == 0.0 || dist_ij == 0.0) continue;  // 0/0 defined as 0
        cone += xi * d_target.dot(d_ij) / (dist_target * dist_ij);
    }

    const double dt_s =
        static_cast<double>(round - buffer.last_replan_round[static_cast<std::size_t>(uav)]) *
        timing.seconds(timing.T);

    return params.alpha1 * dist_target + params.alpha2 * dt_s -
           params.alpha3 * std::max(std::cos(params.beta), cone);
}

std::vector<double> priorities(const SwarmBuffer& buffer, const std::vector<Eigen::VectorXd>& targets,
                               const PriorityParams& params, const TimingConfig& timing,
                               std::int64_t round) {
    std::vector<double> out(static_cast<std::size_t>(buffer.size()));
    for (int i = 0; i < buffer.size(); ++i)
        out[static_cast<std::size_t>(i)] = priority(i, buffer, targets, params, timing, round);
    return out;
}

TriggerDecision select_pbt(const std::vector<double>& prio, int M) {
    if (M < 1) throw std::invalid_argument("select_pbt: M must be >= 1");
    const int N = static_cast<int>(prio.size());
    std::vector<int> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return prio[static_cast<std::size_t>(a)] > prio[static_cast<std::size_t>(b)];
    });
    TriggerDecision d;
    const int count = std::min(M, N);
    d.assignment.reserve(static_cast<std::size_t>(count));
    for (int q = 0; q < count; ++q) d.assignment.emplace_back(q, order[static_cast<std::size_t>(q)]);
    return d;
}

TriggerDecision select_round_robin(std::int64_t round, int N, int M) {
    if (M < 1) throw std::invalid_argument("select_round_robin: M must be >= 1");
    TriggerDecision d;
    const int count = std::min(M, N);
    d.assignment.reserve(static_cast<std::size_t>(count));
    for (int q = 0; q < count; ++q) {
        const std::int64_t idx = (round * M + q) % N;
        d.assignment.emplace_back(q, static_cast<int>(idx));
    }
    return d;
}

}  // namespace swarmplan
