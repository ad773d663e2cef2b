#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "swarmplan/dynamics.hpp"
#include "swarmplan/geometry.hpp"
#include "swarmplan/network.hpp"
#include "swarmplan/qp.hpp"

namespace swarmplan {

struct CostWeights {
    Eigen::MatrixXd Q;  // n x n, positive definite
    Eigen::MatrixXd R;  // m x m, positive definite

    void validate(int n, int m) const;
};

/// Diagonal-weight convenience constructor for the triple-integrator layout.
CostWeights make_weights(int pos_dim, double q_pos, double q_vel, double q_aux, double r);

/// Thrown when a neighbor pair breaks the sample-point separation
/// precondition while building collision rows.
struct SeparationViolation : std::runtime_error {
    int sample;
    double distance;
    SeparationViolation(int h, double dist);
};

/// One collision half-plane: the candidate position p_i at sample h must
/// satisfy  unit_normal' * theta_inv * (neighbor_pos - p_i) >= rhs.
struct HalfPlaneRow {
    Eigen::VectorXd unit_normal;   // n0, unit Euclidean norm
    Eigen::VectorXd neighbor_pos;  // p_j of the previous round at h*Tc + 2T
    double rhs = 0.0;              // (r_hat_min + ||n_ij||) / 2
    int neighbor = 0;
    int sample = 0;                // h
};

/// Scaled difference vectors n_ij at h*Tc + 2T of the previous round's
/// plans, h = 0..h_c, with hold semantics past each plan's horizon.
std::vector<Eigen::VectorXd> difference_vectors(const PlannedTrajectory& plan_i,
                                                const PlannedTrajectory& plan_j,
                                                const ScaledGeometry& geom,
                                                const TimingConfig& timing);

/// Half-plane rows against one neighbor. Throws SeparationViolation when
/// ||n_ij|| falls below r_hat_min (beyond tolerance) at any sample.
std::vector<HalfPlaneRow> tvbvc_rows(const PlannedTrajectory& plan_i,
                                     const PlannedTrajectory& plan_j, int neighbor_id,
                                     const ScaledGeometry& geom, const TimingConfig& timing);

/// Precomputed condensed affine state maps for one (model, timing) pair:
/// x(T + j*base | kT) = phi[j] * x0 + gain[j] * z with z the stacked inputs.
struct Condenser {
    std::vector<Eigen::MatrixXd> phi;   // n x n, one per base-grid sample
    std::vector<Eigen::MatrixXd> gain;  // n x (h_s*m)
    Eigen::MatrixXd Ad, Bd;             // base-step discretization

    Condenser(const LinearModel& model, const TimingConfig& timing);

    int index(Ticks t, const TimingConfig& timing) const {
        return static_cast<int>((t - timing.T) / timing.base_step);
    }
};

/// Condensed QP for one UAV's replanning round: decision variables are the
/// h_s stacked inputs; states are eliminated through the condenser.
QpProblem assemble_qp(int uav, const SwarmBuffer& buffer, const LinearModel& model,
                      const TimingConfig& timing, const ScaledGeometry& geom,
                      const CostWeights& weights, const Eigen::VectorXd& x_target,
                      const Condenser& condenser);

/// Stack a plan's inputs into a decision vector for warm starts and
/// feasibility checks.
Eigen::VectorXd stack_inputs(const PlannedTrajectory& plan);

}  // namespace swarmplan
