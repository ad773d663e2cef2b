#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "swarmplan/time_grid.hpp"

namespace swarmplan {

struct SwarmBuffer;

struct PriorityParams {
    double alpha1 = 1.0;   // 1/m, distance-to-target weight
    double alpha2 = 4.0;   // 1/s, waiting-time weight
    double alpha3 = 0.3;   // blocking-cone weight
    double beta = 0.7853981633974483;  // cone half-angle, radians

    void validate() const;
};

/// Which CU replans which UAV this round. Indices are 0-based; each CU and
/// each UAV appears at most once.
struct TriggerDecision {
    std::vector<std::pair<int, int>> assignment;  // (cu, uav)

    Eigen::MatrixXi gamma(int M, int N) const;
    bool assigns(int uav) const;
    void validate(int M, int N) const;
};

/// Priority of one UAV from the shared buffer snapshot. Positions are read
/// at time 2T of the round-(k-1) plans; the neighbor sum runs in ascending
/// UAV index order so every CU computes the identical value.
double priority(int uav, const SwarmBuffer& buffer, const std::vector<Eigen::VectorXd>& targets,
                const PriorityParams& params, const TimingConfig& timing, std::int64_t round);

std::vector<double> priorities(const SwarmBuffer& buffer, const std::vector<Eigen::VectorXd>& targets,
                               const PriorityParams& params, const TimingConfig& timing,
                               std::int64_t round);

/// CU q gets the UAV with the (q+1)-th highest priority; ties go to the
/// lower UAV index. CUs beyond N idle.
TriggerDecision select_pbt(const std::vector<double>& prio, int M);

/// Baseline: CU q replans UAV (k*M + q) mod N.
TriggerDecision select_round_robin(std::int64_t round, int N, int M);

}  // namespace swarmplan
