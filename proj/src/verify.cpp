#include "swarmplan/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace swarmplan {

namespace {

// True when (A, B) is a pure per-axis integrator chain: state blocks of size
// d feeding the next block with identity, input entering the last block.
bool is_integrator_chain(const LinearModel& model) {
    const int n = model.state_dim();
    const int d = model.pos_dim;
    const int m = model.input_dim();
    if (m != d || n % d != 0) return false;
    const int order = n / d;
    Eigen::MatrixXd chainA = Eigen::MatrixXd::Zero(n, n);
    for (int q = 0; q + 1 < order; ++q) chainA.block(q * d, (q + 1) * d, d, d).setIdentity();
    Eigen::MatrixXd chainB = Eigen::MatrixXd::Zero(n, d);
    chainB.bottomRows(d).setIdentity();
    return (model.A - chainA).cwiseAbs().maxCoeff() == 0.0 &&
           (model.B - chainB).cwiseAbs().maxCoeff() == 0.0;
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace

double delta_p_max(const LinearModel& model, const ScaledGeometry& geom, double horizon_s,
                   bool* certified) {
    model.validate();
    if (horizon_s < 0.0) throw std::invalid_argument("delta_p_max: negative horizon");
    const int n = model.state_dim();
    const int d = model.pos_dim;

    if (is_integrator_chain(model)) {
        // Per-axis displacement is a polynomial in tau with nonnegative
        // coefficients under box magnitudes, so it peaks at tau = horizon.
        const int order = n / d;
        Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
        for (int q = 1; q < order; ++q) {
            const Eigen::VectorXd mag = model.x_min.segment(q * d, d).cwiseAbs().cwiseMax(
                model.x_max.segment(q * d, d).cwiseAbs());
            w += mag * std::pow(horizon_s, q) / factorial(q);
        }
        const Eigen::VectorXd umag = model.u_min.cwiseAbs().cwiseMax(model.u_max.cwiseAbs());
        w += umag * std::pow(horizon_s, order) / factorial(order);
        if (certified) *certified = true;
        return (geom.theta * w).norm();
    }

    // General case: corner enumeration over the boxes on a dense tau grid,
    // inflated by 5%. Not a certified bound.
    if (certified) *certified = false;
    const int m = model.input_dim();
    const int tau_samples = 64;
    double best = 0.0;
    for (int ti = 1; ti <= tau_samples; ++ti) {
        const double tau = horizon_s * ti / tau_samples;
        const auto [Ad, Bd] = discretize(model, tau);
        const Eigen::MatrixXd Mx = geom.theta * (Ad - Eigen::MatrixXd::Identity(n, n)).topRows(d);
        const Eigen::MatrixXd Mu = geom.theta * Bd.topRows(d);
        for (std::uint64_t cx = 0; cx < (1ull << n); ++cx) {
            Eigen::VectorXd x(n);
            for (int i = 0; i < n; ++i) x(i) = (cx >> i) & 1 ? model.x_max(i) : model.x_min(i);
            const Eigen::VectorXd base = Mx * x;
            for (std::uint64_t cu = 0; cu < (1ull << m); ++cu) {
                Eigen::VectorXd u(m);
                for (int i = 0; i < m; ++i) u(i) = (cu >> i) & 1 ? model.u_max(i) : model.u_min(i);
                best = std::max(best, (base + Mu * u).norm());
            }
        }
    }
    return 1.05 * best;
}

namespace {

// Walk the committed buffers in order: initial (round -1), then one per round.
template <typename Fn>
void for_each_buffer(const RunHistory& history, Fn&& fn) {
    fn(static_cast<std::int64_t>(-1), history.initial_buffer);
    for (const RoundRecord& rec : history.rounds) fn(rec.round, rec.buffer_after);
}

}  // namespace

SeparationReport check_lemma1(const RunHistory& history, const ScaledGeometry& geom,
                              const TimingConfig& timing) {
    constexpr double tol = 1e-6;
    const int d = geom.dim();
    SeparationReport rep;
    rep.min_scaled_distance_at_samples = std::numeric_limits<double>::infinity();
    rep.min_scaled_distance_dense = std::numeric_limits<double>::infinity();

    for_each_buffer(history, [&](std::int64_t round, const SwarmBuffer& buffer) {
        const int N = buffer.size();
        for (int h = 0; h <= timing.h_c; ++h) {
            const Ticks t = static_cast<Ticks>(h) * timing.Tc + timing.T;
            for (int i = 0; i < N; ++i) {
                const Eigen::VectorXd p_i =
                    evaluate_plan(buffer.plans[static_cast<std::size_t>(i)], timing, t).head(d);
                for (int j = i + 1; j < N; ++j) {
                    const Eigen::VectorXd p_j =
                        evaluate_plan(buffer.plans[static_cast<std::size_t>(j)], timing, t).head(d);
                    const double dist = (geom.theta_inv * (p_j - p_i)).norm();
                    rep.min_scaled_distance_at_samples =
                        std::min(rep.min_scaled_distance_at_samples, dist);
                    if (dist < geom.r_hat_min - tol) {
                        ++rep.sample_violations;
                        if (!rep.first_violation)
                            rep.first_violation = SeparationViolationSite{round, i, j, t, dist};
                    }
                }
            }
        }
    });
    return rep;
}

SeparationReport check_theorem2(const RunHistory& history, const LinearModel& model,
                                const ScaledGeometry& geom, const TimingConfig& timing) {
    constexpr double tol = 1e-6;
    const int d = geom.dim();
    SeparationReport rep = check_lemma1(history, geom, timing);
    rep.first_violation.reset();
    rep.sample_violations = 0;  // this report counts dense violations only
    rep.min_scaled_distance_dense = std::numeric_limits<double>::infinity();

    bool certified = false;
    rep.delta_p_max = delta_p_max(model, geom, timing.seconds(timing.Tc), &certified);
    rep.guarantee_configured =
        certified && geom.r_hat_min - 2.0 * rep.delta_p_max >= geom.r_min;

    // Executed timeline: the buffer committed in round k controls
    // [(k+1)T, (k+2)T), i.e. its plans on [T, 2T). The initial buffer covers
    // [0, T); the final buffer contributes its closing endpoint as well.
    const Ticks steps_per_round = timing.T / timing.base_step;
    std::int64_t buffer_count = 0;
    for_each_buffer(history, [&](std::int64_t, const SwarmBuffer&) { ++buffer_count; });

    std::int64_t seen = 0;
    for_each_buffer(history, [&](std::int64_t round, const SwarmBuffer& buffer) {
        ++seen;
        const bool last = seen == buffer_count;
        const int N = buffer.size();
        for (Ticks s = 0; s <= (last ? steps_per_round : steps_per_round - 1); ++s) {
            const Ticks t = timing.T + s * timing.base_step;
            for (int i = 0; i < N; ++i) {
                const Eigen::VectorXd p_i =
                    evaluate_plan(buffer.plans[static_cast<std::size_t>(i)], timing, t).head(d);
                for (int j = i + 1; j < N; ++j) {
                    const Eigen::VectorXd p_j =
                        evaluate_plan(buffer.plans[static_cast<std::size_t>(j)], timing, t).head(d);
                    const double dist = (geom.theta_inv * (p_j - p_i)).norm();
                    rep.min_scaled_distance_dense = std::min(rep.min_scaled_distance_dense, dist);
                    if (dist < geom.r_min - tol) {
                        ++rep.dense_violations;
                        if (!rep.first_violation)
                            rep.first_violation = SeparationViolationSite{round, i, j, t, dist};
                    }
                }
            }
        }
    });
    return rep;
}

TheoremOneReport check_theorem1(const RunHistory& history, const LinearModel& model,
                                const TimingConfig& timing, const ScaledGeometry& geom,
                                const CostWeights& weights,
                                const std::vector<Eigen::VectorXd>& targets) {
    constexpr double tol = 1e-9;
    const int n = model.state_dim();
    const int d = model.pos_dim;
    TheoremOneReport rep;
    const Condenser condenser(model, timing);

    for (std::size_t r = 0; r < history.rounds.size(); ++r) {
        const RoundRecord& rec = history.rounds[r];
        const SwarmBuffer& before = r == 0 ? history.initial_buffer : history.rounds[r - 1].buffer_after;
        for (const auto& [cu, uav] : rec.decision.assignment) {
            Eigen::VectorXd x_target(n);
            x_target.setZero();
            x_target.head(d) = targets[static_cast<std::size_t>(uav)];

            const QpProblem qp =
                assemble_qp(uav, before, model, timing, geom, weights, x_target, condenser);
            const PlannedTrajectory shifted =
                shift_plan(before.plans[static_cast<std::size_t>(uav)], timing);
            const FeasibilityReport feas = check_feasible(qp, stack_inputs(shifted));
            ++rep.checked;
            rep.max_violation = std::max(rep.max_violation, feas.max());
            if (feas.max() > tol) {
                ++rep.breaches;
                if (!rep.first_breach) {
                    std::string family = "input_box";
                    double worst = feas.input_box;
                    if (feas.state_box > worst) { worst = feas.state_box; family = "state_box"; }
                    if (feas.collision > worst) { worst = feas.collision; family = "collision"; }
                    if (feas.terminal > worst) { worst = feas.terminal; family = "terminal"; }
                    rep.first_breach = FeasibilityBreach{rec.round, uav, feas.max(), family};
                }
            }
            if (rec.solver_status[static_cast<std::size_t>(uav)] == QpStatus::Infeasible)
                ++rep.infeasible_solves;
        }
    }
    return rep;
}

}  // namespace swarmplan
