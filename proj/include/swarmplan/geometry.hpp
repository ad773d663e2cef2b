#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace swarmplan {

/// Symmetric positive-definite distance scaling plus the two separation
/// radii: r_min is the hard collision distance, r_hat_min the inflated
/// radius enforced at sample points.
struct ScaledGeometry {
    Eigen::MatrixXd theta;      // d x d SPD
    Eigen::MatrixXd theta_inv;
    double r_min = 0.3;
    double r_hat_min = 0.7;

    int dim() const { return static_cast<int>(theta.rows()); }

    /// || theta_inv * (a - b) ||_2
    double scaled_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
        return (theta_inv * (a - b)).norm();
    }

    void validate() const {
        if (theta.rows() != theta.cols()) throw std::invalid_argument("ScaledGeometry: theta not square");
        if ((theta - theta.transpose()).cwiseAbs().maxCoeff() >
            1e-12 * std::max(1.0, theta.cwiseAbs().maxCoeff()))
            throw std::invalid_argument("ScaledGeometry: theta not symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(theta);
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw std::invalid_argument("ScaledGeometry: theta not positive definite");
        if ((theta * theta_inv - Eigen::MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff() > 1e-9)
            throw std::invalid_argument("ScaledGeometry: theta_inv is not the inverse of theta");
        if (r_min <= 0.0) throw std::invalid_argument("ScaledGeometry: r_min must be positive");
        if (r_hat_min < r_min) throw std::invalid_argument("ScaledGeometry: r_hat_min must be >= r_min");
    }
};

inline ScaledGeometry make_geometry(const Eigen::VectorXd& theta_diag, double r_min,
                                    double r_hat_min) {
    ScaledGeometry g;
    g.theta = theta_diag.asDiagonal();
    g.theta_inv = theta_diag.cwiseInverse().asDiagonal();
    g.r_min = r_min;
    g.r_hat_min = r_hat_min;
    g.validate();
    return g;
}

}  // namespace swarmplan
