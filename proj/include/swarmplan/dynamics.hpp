#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "swarmplan/time_grid.hpp"

namespace swarmplan {

/// Continuous-time linear vehicle model with state/input boxes.
///
/// State layout: [position (pos_dim), velocity (pos_dim), auxiliary (rest)].
/// The leading block rows are fixed to d(position)/dt = velocity with no
/// direct input, which the planner relies on.
struct LinearModel {
    Eigen::MatrixXd A;  // n x n
    Eigen::MatrixXd B;  // n x m
    int pos_dim = 3;
    Eigen::VectorXd x_min, x_max;  // state box
    Eigen::VectorXd u_min, u_max;  // input box

    int state_dim() const { return static_cast<int>(A.rows()); }
    int input_dim() const { return static_cast<int>(B.cols()); }

    void validate() const;
};

/// Per-axis triple integrator (position, velocity, acceleration; jerk input)
/// replicated over `axes` axes. State is [p, v, a] grouped by quantity.
LinearModel triple_integrator(const Eigen::VectorXd& pos_min, const Eigen::VectorXd& pos_max,
                              double v_max, double a_max, double j_max);

/// exp(M) via scaling-and-squaring with a degree-6 Pade approximant; exact
/// finite series when M is nilpotent.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& M);

/// Exact zero-order-hold discretization: Ad = exp(A*step),
/// Bd = integral_0^step exp(A*tau) B dtau.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> discretize(const LinearModel& model, double step);

/// One UAV's plan for one round. Inputs are piecewise-constant on the Ts
/// grid; states are sampled on the base-step grid at t = T, T+base, ..., HT+T
/// relative to the planning round's start. Past HT+T the plan holds its
/// terminal state with zero input.
struct PlannedTrajectory {
    std::int64_t planned_round = 0;
    std::vector<Eigen::VectorXd> inputs;  // h_s entries
    std::vector<Eigen::VectorXd> states;  // plan_samples() entries
    Eigen::VectorXd origin_state;         // == states.front()
};

/// Exact propagation of piecewise-constant inputs on the base-step grid.
/// `grid` times must be nonnegative multiples of base_step, ascending.
/// Inputs past the provided sequence are zero.
std::vector<Eigen::VectorXd> propagate(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                                       const Eigen::VectorXd& x0,
                                       const std::vector<Eigen::VectorXd>& inputs, Ticks input_dt,
                                       Ticks base_step, const std::vector<Ticks>& grid);

/// Build a plan by propagating `origin_state` (the state at time T relative
/// to round start) through `inputs` over the full [T, HT+T] base grid.
PlannedTrajectory make_plan(const LinearModel& model, const TimingConfig& timing,
                            std::int64_t planned_round, const Eigen::VectorXd& origin_state,
                            std::vector<Eigen::VectorXd> inputs);

/// Stationary plan: hold `state` (zero velocity/auxiliary assumed by caller)
/// with zero input over the whole horizon.
PlannedTrajectory hover_plan(const LinearModel& model, const TimingConfig& timing,
                             std::int64_t planned_round, const Eigen::VectorXd& state);

/// Sample a plan at time t (relative to its planning round start).
/// Requires t >= T and t on the base grid; t past HT+T returns the terminal
/// state unchanged.
const Eigen::VectorXd& evaluate_plan(const PlannedTrajectory& plan, const TimingConfig& timing,
                                     Ticks t);

/// Input active at time t >= T (zero past the horizon).
Eigen::VectorXd plan_input(const PlannedTrajectory& plan, const TimingConfig& timing, Ticks t,
                           int input_dim);

}  // namespace swarmplan
