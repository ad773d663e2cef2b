#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "swarmplan/geometry.hpp"

namespace swarmplan {

struct PackingFailure : std::runtime_error {
    explicit PackingFailure(const std::string& what) : std::runtime_error(what) {}
};

/// One realization of initial and target positions.
struct Scenario {
    int N = 0;
    int M = 0;
    std::vector<Eigen::VectorXd> initial_states;  // full state, velocity/aux zero
    std::vector<Eigen::VectorXd> targets;         // positions only
    Eigen::VectorXd space_min, space_max;         // axis-aligned flight space
    std::uint64_t seed = 0;
};

/// Rejection-sampled uniform initial and target positions with pairwise
/// scaled separation >= r_hat_min (independently for each set).
/// Deterministic in `seed`; throws PackingFailure after 1e5 attempts.
Scenario generate_scenario(int N, int M, const Eigen::VectorXd& space_min,
                           const Eigen::VectorXd& space_max, const ScaledGeometry& geom,
                           std::uint64_t seed, int state_dim);

}  // namespace swarmplan
