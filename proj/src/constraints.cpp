#include "swarmplan/constraints.hpp"

#include <string>

namespace swarmplan {

void CostWeights::validate(int n, int m) const {
    if (Q.rows() != n || Q.cols() != n || R.rows() != m || R.cols() != m)
        throw std::invalid_argument("CostWeights: dimension mismatch with model");
    Eigen::LLT<Eigen::MatrixXd> lq(Q), lr(R);
    if (lq.info() != Eigen::Success || lr.info() != Eigen::Success)
        throw std::invalid_argument("CostWeights: Q and R must be positive definite");
}

CostWeights make_weights(int pos_dim, double q_pos, double q_vel, double q_aux, double r) {
    const int d = pos_dim;
    Eigen::VectorXd qd(3 * d);
    qd << Eigen::VectorXd::Constant(d, q_pos), Eigen::VectorXd::Constant(d, q_vel),
        Eigen::VectorXd::Constant(d, q_aux);
    CostWeights w;
    w.Q = qd.asDiagonal();
    w.R = r * Eigen::MatrixXd::Identity(d, d);
    return w;
}

SeparationViolation::SeparationViolation(int h, double dist)
    : std::runtime_error("separation precondition broken at sample " + std::to_string(h) +
                         ", scaled distance " + std::to_string(dist)),
      sample(h),
      distance(dist) {}

std::vector<Eigen::VectorXd> difference_vectors(const PlannedTrajectory& plan_i,
                                                const PlannedTrajectory& plan_j,
                                                const ScaledGeometry& geom,
                                                const TimingConfig& timing) {
    if (&plan_i == &plan_j)
        throw std::invalid_argument("difference_vectors: identical plan objects (i == j)");
    const int d = geom.dim();
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(timing.h_c + 1));
    for (int h = 0; h <= timing.h_c; ++h) {
        const Ticks t = static_cast<Ticks>(h) * timing.Tc + 2 * timing.T;
        const Eigen::VectorXd p_i = evaluate_plan(plan_i, timing, t).head(d);
        const Eigen::VectorXd p_j = evaluate_plan(plan_j, timing, t).head(d);
        out.push_back(geom.theta_inv * (p_j - p_i));
    }
    return out;
}

std::vector<HalfPlaneRow> tvbvc_rows(const PlannedTrajectory& plan_i,
                                     const PlannedTrajectory& plan_j, int neighbor_id,
                                     const ScaledGeometry& geom, const TimingConfig& timing) {
    // Geometric slack matching the Lemma 1 verification tolerance; a pair
    // short of r_hat_min by more than this is a broken invariant chain.
    constexpr double kSeparationTol = 1e-6;

    const int d = geom.dim();
    const auto diffs = difference_vectors(plan_i, plan_j, geom, timing);
    std::vector<HalfPlaneRow> rows;
    rows.reserve(diffs.size());
    for (int h = 0; h <= timing.h_c; ++h) {
        const Eigen::VectorXd& n = diffs[static_cast<std::size_t>(h)];
        const double dist = n.norm();
        if (dist < geom.r_hat_min - kSeparationTol) throw SeparationViolation(h, dist);

        const Ticks t = static_cast<Ticks>(h) * timing.Tc + 2 * timing.T;
        HalfPlaneRow row;
        row.unit_normal = n / dist;
        row.neighbor_pos = evaluate_plan(plan_j, timing, t).head(d);
        row.rhs = 0.5 * (geom.r_hat_min + dist);
        row.neighbor = neighbor_id;
        row.sample = h;
        rows.push_back(std::move(row));
    }
    return rows;
}

Condenser::Condenser(const LinearModel& model, const TimingConfig& timing) {
    const auto [ad, bd] = discretize(model, timing.seconds(timing.base_step));
    Ad = ad;
    Bd = bd;
    const int n = model.state_dim();
    const int m = model.input_dim();
    const int nz = timing.h_s * m;
    const int samples = timing.plan_samples();

    phi.reserve(static_cast<std::size_t>(samples));
    gain.reserve(static_cast<std::size_t>(samples));
    phi.push_back(Eigen::MatrixXd::Identity(n, n));
    gain.push_back(Eigen::MatrixXd::Zero(n, nz));
    for (int j = 1; j < samples; ++j) {
        const int block = static_cast<int>((static_cast<Ticks>(j - 1) * timing.base_step) / timing.Ts);
        phi.push_back(Ad * phi.back());
        Eigen::MatrixXd g = Ad * gain.back();
        g.middleCols(block * m, m) += Bd;
        gain.push_back(std::move(g));
    }
}

Eigen::VectorXd stack_inputs(const PlannedTrajectory& plan) {
    const int m = static_cast<int>(plan.inputs.front().size());
    Eigen::VectorXd z(static_cast<int>(plan.inputs.size()) * m);
    for (std::size_t l = 0; l < plan.inputs.size(); ++l)
        z.segment(static_cast<int>(l) * m, m) = plan.inputs[l];
    return z;
}

QpProblem assemble_qp(int uav, const SwarmBuffer& buffer, const LinearModel& model,
                      const TimingConfig& timing, const ScaledGeometry& geom,
                      const CostWeights& weights, const Eigen::VectorXd& x_target,
                      const Condenser& condenser) {
    const int n = model.state_dim();
    const int m = model.input_dim();
    const int d = model.pos_dim;
    weights.validate(n, m);
    if (x_target.size() != n) throw std::invalid_argument("assemble_qp: target dimension mismatch");
    if (uav < 0 || uav >= buffer.size()) throw std::invalid_argument("assemble_qp: UAV out of range");

    const int nz = timing.h_s * m;
    const int N = buffer.size();
    const PlannedTrajectory& prev = buffer.plans[static_cast<std::size_t>(uav)];

    // The new plan starts at T relative to kT, i.e. at 2T of the previous one.
    const Eigen::VectorXd x0 = evaluate_plan(prev, timing, 2 * timing.T);

    QpProblem qp;
    qp.hessian = Eigen::MatrixXd::Zero(nz, nz);
    qp.linear = Eigen::VectorXd::Zero(nz);

    // Objective on the To grid. Inputs enter by the zero-order hold; the
    // sample at kappa = h_o sits at HT where the input is already zero.
    const int step_o = static_cast<int>(timing.To / timing.base_step);
    for (int kappa = 0; kappa <= timing.h_o; ++kappa) {
        const Eigen::MatrixXd& G = condenser.gain[static_cast<std::size_t>(kappa * step_o)];
        const Eigen::MatrixXd& P = condenser.phi[static_cast<std::size_t>(kappa * step_o)];
        const Eigen::VectorXd offset = P * x0 - x_target;
        qp.hessian += 2.0 * G.transpose() * weights.Q * G;
        qp.linear += 2.0 * G.transpose() * (weights.Q * offset);

        const Ticks tau = static_cast<Ticks>(kappa) * timing.To;
        if (tau < timing.horizon_end()) {
            const int block = static_cast<int>(tau / timing.Ts);
            qp.hessian.block(block * m, block * m, m, m) += 2.0 * weights.R;
        }
    }

    // Input box as variable bounds.
    qp.var_lower.resize(nz);
    qp.var_upper.resize(nz);
    for (int l = 0; l < timing.h_s; ++l) {
        qp.var_lower.segment(l * m, m) = model.u_min;
        qp.var_upper.segment(l * m, m) = model.u_max;
    }

    // Inequality rows: state box on the Tb grid, then collision half-planes.
    const int box_rows = 2 * n * (timing.h_b + 1);
    const int col_rows = (N - 1) * (timing.h_c + 1);
    qp.ineq_matrix.resize(box_rows + col_rows, nz);
    qp.ineq_upper.resize(box_rows + col_rows);
    qp.state_box_rows = box_rows;
    qp.collision_rows = col_rows;

    const int step_b = static_cast<int>(timing.Tb / timing.base_step);
    int row = 0;
    for (int kappa = 0; kappa <= timing.h_b; ++kappa) {
        const Eigen::MatrixXd& G = condenser.gain[static_cast<std::size_t>(kappa * step_b)];
        const Eigen::VectorXd drift = condenser.phi[static_cast<std::size_t>(kappa * step_b)] * x0;
        qp.ineq_matrix.middleRows(row, n) = G;
        qp.ineq_upper.segment(row, n) = model.x_max - drift;
        qp.ineq_matrix.middleRows(row + n, n) = -G;
        qp.ineq_upper.segment(row + n, n) = drift - model.x_min;
        row += 2 * n;
    }

    const int step_c = static_cast<int>(timing.Tc / timing.base_step);
    for (int j = 0; j < N; ++j) {
        if (j == uav) continue;
        const auto rows_j =
            tvbvc_rows(prev, buffer.plans[static_cast<std::size_t>(j)], j, geom, timing);
        for (const HalfPlaneRow& hp : rows_j) {
            // n0' Theta_inv (p_j_prev - p_i_new) >= rhs, with
            // p_i_new = [I_d 0] (phi x0 + G z).
            const Eigen::RowVectorXd a = hp.unit_normal.transpose() * geom.theta_inv;
            const std::size_t idx = static_cast<std::size_t>(hp.sample * step_c);
            const Eigen::VectorXd drift_pos = (condenser.phi[idx] * x0).head(d);
            // a (p_j - drift - G_pos z) >= rhs  <=>  a G_pos z <= a (p_j - drift) - rhs
            qp.ineq_matrix.row(row) = a * condenser.gain[idx].topRows(d);
            qp.ineq_upper(row) = a.dot(hp.neighbor_pos - drift_pos) - hp.rhs;
            ++row;
        }
    }

    // Terminal condition: velocity and auxiliary state zero at HT + T.
    const std::size_t last = condenser.phi.size() - 1;
    qp.eq_matrix = condenser.gain[last].bottomRows(n - d);
    qp.eq_rhs = -(condenser.phi[last] * x0).tail(n - d);

    return qp;
}

}  // namespace swarmplan
