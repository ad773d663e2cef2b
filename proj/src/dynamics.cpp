#include "swarmplan/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace swarmplan {

void LinearModel::validate() const {
    const int n = state_dim();
    const int m = input_dim();
    const int d = pos_dim;
    if (A.rows() != A.cols()) throw std::invalid_argument("LinearModel: A must be square");
    if (B.rows() != n) throw std::invalid_argument("LinearModel: B row count mismatch");
    if (d <= 0 || 2 * d > n) throw std::invalid_argument("LinearModel: invalid pos_dim");
    if (x_min.size() != n || x_max.size() != n || u_min.size() != m || u_max.size() != m)
        throw std::invalid_argument("LinearModel: box dimension mismatch");

    // Position block rows: d(pos)/dt = velocity, no input.
    Eigen::MatrixXd top = Eigen::MatrixXd::Zero(d, n);
    top.block(0, d, d, d).setIdentity();
    if ((A.topRows(d) - top).cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument("LinearModel: top rows of A must be [0 I 0]");
    if (B.topRows(d).cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument("LinearModel: top rows of B must be zero");

    if (!x_min.allFinite() || !x_max.allFinite() || !u_min.allFinite() || !u_max.allFinite())
        throw std::invalid_argument("LinearModel: boxes must be finite");
    if (((x_max - x_min).array() <= 0.0).any() || ((u_max - u_min).array() <= 0.0).any())
        throw std::invalid_argument("LinearModel: boxes must have positive width");
}

LinearModel triple_integrator(const Eigen::VectorXd& pos_min, const Eigen::VectorXd& pos_max,
                              double v_max, double a_max, double j_max) {
    const int d = static_cast<int>(pos_min.size());
    const int n = 3 * d;
    LinearModel model;
    model.pos_dim = d;
    model.A = Eigen::MatrixXd::Zero(n, n);
    model.A.block(0, d, d, d).setIdentity();      // dp = v
    model.A.block(d, 2 * d, d, d).setIdentity();  // dv = a
    model.B = Eigen::MatrixXd::Zero(n, d);
    model.B.block(2 * d, 0, d, d).setIdentity();  // da = u

    model.x_min.resize(n);
    model.x_max.resize(n);
    model.x_min << pos_min, Eigen::VectorXd::Constant(d, -v_max), Eigen::VectorXd::Constant(d, -a_max);
    model.x_max << pos_max, Eigen::VectorXd::Constant(d, v_max), Eigen::VectorXd::Constant(d, a_max);
    model.u_min = Eigen::VectorXd::Constant(d, -j_max);
    model.u_max = Eigen::VectorXd::Constant(d, j_max);
    model.validate();
    return model;
}

namespace {

// Returns k such that M^k == 0 exactly, or -1 if M is not nilpotent.
int nilpotency_index(const Eigen::MatrixXd& M) {
    const int n = static_cast<int>(M.rows());
    Eigen::MatrixXd P = M;
    for (int k = 1; k <= n; ++k) {
        if (P.cwiseAbs().maxCoeff() == 0.0) return k;
        P = P * M;
    }
    return -1;
}

Eigen::MatrixXd expm_pade6(const Eigen::MatrixXd& M) {
    const int n = static_cast<int>(M.rows());
    const double norm = M.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));

    const Eigen::MatrixXd As = M / std::ldexp(1.0, squarings);

    // Degree-6 Pade: p(x)/q(x) with q(x) = p(-x).
    static const double c[] = {1.0,       1.0 / 2.0,    5.0 / 44.0,      1.0 / 66.0,
                               1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0};
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd A2 = As * As;
    const Eigen::MatrixXd A4 = A2 * A2;
    const Eigen::MatrixXd A6 = A4 * A2;
    const Eigen::MatrixXd even = c[0] * I + c[2] * A2 + c[4] * A4 + c[6] * A6;
    const Eigen::MatrixXd odd = As * (c[1] * I + c[3] * A2 + c[5] * A4);

    Eigen::MatrixXd R = (even - odd).partialPivLu().solve(even + odd);
    for (int s = 0; s < squarings; ++s) R = R * R;
    return R;
}

}  // namespace

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols()) throw std::invalid_argument("matrix_exponential: non-square input");
    const int n = static_cast<int>(M.rows());
    const int k = nilpotency_index(M);
    if (k >= 0) {
        // Finite Taylor series, exact for integrator chains.
        Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(n, n);
        Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
        for (int i = 1; i < k; ++i) {
            term = term * M / static_cast<double>(i);
            sum += term;
        }
        return sum;
    }
    return expm_pade6(M);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> discretize(const LinearModel& model, double step) {
    if (step <= 0.0) throw std::invalid_argument("discretize: step must be positive");
    const int n = model.state_dim();
    const int m = model.input_dim();
    // Augmented exponential: exp([A B; 0 0]*h) = [Ad Bd; 0 I].
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = model.A * step;
    aug.topRightCorner(n, m) = model.B * step;
    const Eigen::MatrixXd E = matrix_exponential(aug);
    return {E.topLeftCorner(n, n), E.topRightCorner(n, m)};
}

std::vector<Eigen::VectorXd> propagate(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                                       const Eigen::VectorXd& x0,
                                       const std::vector<Eigen::VectorXd>& inputs, Ticks input_dt,
                                       Ticks base_step, const std::vector<Ticks>& grid) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(grid.size());
    if (grid.empty()) return out;

    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (grid[g] < 0 || grid[g] % base_step != 0)
            throw std::invalid_argument("propagate: grid time not a nonnegative multiple of base_step");
        if (g > 0 && grid[g] <= grid[g - 1])
            throw std::invalid_argument("propagate: grid must be strictly ascending");
    }

    const int m = static_cast<int>(Bd.cols());
    const Eigen::VectorXd zero_u = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd x = x0;
    Ticks t = 0;
    std::size_t g = 0;
    while (g < grid.size()) {
        if (grid[g] == t) {
            out.push_back(x);
            ++g;
            continue;
        }
        const std::size_t block = static_cast<std::size_t>(t / input_dt);
        const Eigen::VectorXd& u = block < inputs.size() ? inputs[block] : zero_u;
        x = Ad * x + Bd * u;
        t += base_step;
    }
    return out;
}

PlannedTrajectory make_plan(const LinearModel& model, const TimingConfig& timing,
                            std::int64_t planned_round, const Eigen::VectorXd& origin_state,
                            std::vector<Eigen::VectorXd> inputs) {
    const auto [Ad, Bd] = discretize(model, timing.seconds(timing.base_step));
    const int samples = timing.plan_samples();
    std::vector<Ticks> grid(samples);
    for (int j = 0; j < samples; ++j) grid[j] = static_cast<Ticks>(j) * timing.base_step;

    PlannedTrajectory plan;
    plan.planned_round = planned_round;
    plan.states = propagate(Ad, Bd, origin_state, inputs, timing.Ts, timing.base_step, grid);
    plan.inputs = std::move(inputs);
    plan.origin_state = plan.states.front();
    return plan;
}

PlannedTrajectory hover_plan(const LinearModel& model, const TimingConfig& timing,
                             std::int64_t planned_round, const Eigen::VectorXd& state) {
    PlannedTrajectory plan;
    plan.planned_round = planned_round;
    plan.inputs.assign(static_cast<std::size_t>(timing.h_s),
                       Eigen::VectorXd::Zero(model.input_dim()));
    plan.states.assign(static_cast<std::size_t>(timing.plan_samples()), state);
    plan.origin_state = state;
    return plan;
}

const Eigen::VectorXd& evaluate_plan(const PlannedTrajectory& plan, const TimingConfig& timing,
                                     Ticks t) {
    if (t < timing.T) throw std::invalid_argument("evaluate_plan: plans start at time T");
    if (t % timing.base_step != 0)
        throw std::invalid_argument("evaluate_plan: time off the base grid");
    const std::size_t idx = static_cast<std::size_t>((t - timing.T) / timing.base_step);
    if (idx >= plan.states.size()) return plan.states.back();  // post-horizon hold
    return plan.states[idx];
}

Eigen::VectorXd plan_input(const PlannedTrajectory& plan, const TimingConfig& timing, Ticks t,
                           int input_dim) {
    if (t < timing.T) throw std::invalid_argument("plan_input: plans start at time T");
    const std::size_t block = static_cast<std::size_t>((t - timing.T) / timing.Ts);
    if (block >= plan.inputs.size()) return Eigen::VectorXd::Zero(input_dim);
    return plan.inputs[block];
}

}  // namespace swarmplan
