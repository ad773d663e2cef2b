#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

namespace swarmplan {

enum class QpStatus { Optimal, Infeasible, MaxIterations };

std::string to_string(QpStatus s);

/// Dense convex QP:
///   min  0.5 x' H x + f' x
///   s.t. ineq_matrix x <= ineq_upper
///        eq_matrix x == eq_rhs
///        var_lower <= x <= var_upper
///
/// The first `state_box_rows` inequality rows are state-box constraints and
/// the following `collision_rows` are collision half-planes; the split only
/// drives per-family violation reporting.
struct QpProblem {
    Eigen::MatrixXd hessian;
    Eigen::VectorXd linear;
    Eigen::MatrixXd ineq_matrix;
    Eigen::VectorXd ineq_upper;
    Eigen::MatrixXd eq_matrix;
    Eigen::VectorXd eq_rhs;
    Eigen::VectorXd var_lower, var_upper;

    int state_box_rows = 0;
    int collision_rows = 0;

    int num_vars() const { return static_cast<int>(hessian.rows()); }
    int num_ineq() const { return static_cast<int>(ineq_matrix.rows()); }
    int num_eq() const { return static_cast<int>(eq_matrix.rows()); }

    double objective(const Eigen::VectorXd& x) const {
        return 0.5 * x.dot(hessian * x) + linear.dot(x);
    }

    void validate() const;
};

struct KktResiduals {
    double stationarity = 0.0;
    double primal = 0.0;
    double dual = 0.0;
    double complementarity = 0.0;
    double max() const;
};

struct QpSolution {
    Eigen::VectorXd primal;
    Eigen::VectorXd ineq_duals;   // >= 0 at Optimal
    Eigen::VectorXd eq_duals;
    Eigen::VectorXd bound_duals;  // signed: > 0 active upper, < 0 active lower
    QpStatus status = QpStatus::MaxIterations;
    KktResiduals kkt;
    int iterations = 0;
    double objective = 0.0;
};

struct QpSettings {
    double kkt_tol = 1e-6;
    int max_iterations = 4000;
    double rho = 0.1;           // ADMM penalty (equality rows use rho * 1e3)
    double sigma = 1e-6;        // proximal regularization
    double alpha = 1.6;         // over-relaxation
};

/// Operator-splitting solve with an active-set polish step. Deterministic:
/// identical inputs (and warm start) give bit-identical output.
QpSolution solve(const QpProblem& problem, const std::optional<Eigen::VectorXd>& warm_start = {},
                 const QpSettings& settings = {});

/// Max constraint violation per family at `point`. Feasible iff every entry
/// is <= the caller's tolerance.
struct FeasibilityReport {
    double input_box = 0.0;  // variable bounds
    double state_box = 0.0;
    double collision = 0.0;
    double other_ineq = 0.0;
    double terminal = 0.0;   // equality rows
    double max() const;
};

FeasibilityReport check_feasible(const QpProblem& problem, const Eigen::VectorXd& point);

}  // namespace swarmplan
