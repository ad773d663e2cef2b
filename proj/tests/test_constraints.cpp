#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "swarmplan/constraints.hpp"
#include "swarmplan/scenario.hpp"
#include "swarmplan/sim.hpp"

using namespace swarmplan;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

TimingConfig default_timing() {
    TimingConfig t;
    t.validate();
    return t;
}

LinearModel default_model() {
    return triple_integrator(VectorXd::Constant(3, -2.5), VectorXd::Constant(3, 2.5), 2.0, 3.0, 8.0);
}

ScaledGeometry identity_geom(double r_min = 0.3, double r_hat = 0.7) {
    return make_geometry(VectorXd::Ones(3), r_min, r_hat);
}

PlannedTrajectory stationary(const LinearModel& model, const TimingConfig& timing, double x,
                             double y, double z) {
    VectorXd state = VectorXd::Zero(9);
    state.head(3) << x, y, z;
    return hover_plan(model, timing, -1, state);
}

}  // namespace

TEST_CASE("difference vectors of stationary plans") {
    const auto model = default_model();
    const auto timing = default_timing();
    const auto geom = identity_geom();
    const auto plan_i = stationary(model, timing, -1.0, 0.0, 0.0);
    const auto plan_j = stationary(model, timing, 1.0, 0.0, 0.0);

    const auto diffs = difference_vectors(plan_i, plan_j, geom, timing);
    REQUIRE(static_cast<int>(diffs.size()) == timing.h_c + 1);
    for (const auto& n : diffs) {
        CHECK(n(0) == doctest::Approx(2.0));
        CHECK(n(1) == 0.0);
        CHECK(n(2) == 0.0);
    }

    // Coincident plans give all-zero vectors.
    const auto plan_k = stationary(model, timing, -1.0, 0.0, 0.0);
    for (const auto& n : difference_vectors(plan_i, plan_k, geom, timing))
        CHECK(n.cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(difference_vectors(plan_i, plan_i, geom, timing), std::invalid_argument);
}

TEST_CASE("theta scaling deforms the difference vector") {
    const auto model = default_model();
    const auto timing = default_timing();
    const auto geom = make_geometry((VectorXd(3) << 1.0, 1.0, 2.0).finished(), 0.3, 0.7);
    const auto plan_i = stationary(model, timing, 0.0, 0.0, -2.0);
    const auto plan_j = stationary(model, timing, 0.0, 0.0, 2.0);
    const auto diffs = difference_vectors(plan_i, plan_j, geom, timing);
    CHECK(diffs[0](2) == doctest::Approx(2.0));  // (4 along z) / 2
}

TEST_CASE("TV-BVC half-plane rows implement the buffered cut") {
    const auto model = default_model();
    const auto timing = default_timing();
    const auto geom = identity_geom(0.3, 0.7);
    const auto plan_i = stationary(model, timing, -1.0, 0.0, 0.0);
    const auto plan_j = stationary(model, timing, 1.0, 0.0, 0.0);

    const auto rows = tvbvc_rows(plan_i, plan_j, 1, geom, timing);
    REQUIRE(static_cast<int>(rows.size()) == timing.h_c + 1);
    for (const auto& row : rows) {
        CHECK(row.unit_normal.norm() == doctest::Approx(1.0));
        CHECK(row.rhs == doctest::Approx(0.5 * (0.7 + 2.0)));  // 1.35

        // Staying put is feasible: n0' (p_j - p_i) = 2 >= 1.35.
        VectorXd stay(3);
        stay << -1.0, 0.0, 0.0;
        const double lhs_stay = row.unit_normal.dot(geom.theta_inv * (row.neighbor_pos - stay));
        CHECK(lhs_stay >= row.rhs);

        // Moving to x = 0.3 is cut: lhs = 0.7 < 1.35.
        VectorXd moved(3);
        moved << 0.3, 0.0, 0.0;
        const double lhs_moved = row.unit_normal.dot(geom.theta_inv * (row.neighbor_pos - moved));
        CHECK(lhs_moved == doctest::Approx(0.7));
        CHECK(lhs_moved < row.rhs);
    }
}

TEST_CASE("pair exactly at r_hat_min sits on the cut boundary") {
    const auto model = default_model();
    const auto timing = default_timing();
    const auto geom = identity_geom(0.3, 0.7);
    const auto plan_i = stationary(model, timing, 0.0, 0.0, 0.0);
    const auto plan_j = stationary(model, timing, 0.7, 0.0, 0.0);

    const auto rows = tvbvc_rows(plan_i, plan_j, 1, geom, timing);
    for (const auto& row : rows) {
        VectorXd stay = VectorXd::Zero(3);
        const double lhs = row.unit_normal.dot(geom.theta_inv * (row.neighbor_pos - stay));
        CHECK(lhs == doctest::Approx(row.rhs));  // equality margin (||n|| - r_hat)/2 = 0
    }
}

TEST_CASE("separation precondition violations are reported, not accepted") {
    const auto model = default_model();
    const auto timing = default_timing();
    const auto geom = identity_geom(0.3, 0.7);
    const auto plan_i = stationary(model, timing, 0.0, 0.0, 0.0);
    const auto plan_j = stationary(model, timing, 0.4, 0.0, 0.0);
    CHECK_THROWS_AS(tvbvc_rows(plan_i, plan_j, 1, geom, timing), SeparationViolation);
}

TEST_CASE("assembled QP row counts for a single UAV") {
    const auto model = default_model();
    const auto timing = default_timing();
    const auto geom = identity_geom();
    const auto weights = make_weights(3, 1.0, 0.05, 0.01, 0.01);
    const Condenser condenser(model, timing);

    SwarmBuffer buffer;
    buffer.plans.push_back(stationary(model, timing, 0.0, 0.0, 0.0));
    buffer.last_replan_round.push_back(-1);
    buffer.current_round = 0;

    VectorXd target = VectorXd::Zero(9);
    const auto qp = assemble_qp(0, buffer, model, timing, geom, weights, target, condenser);

    CHECK(qp.num_vars() == timing.h_s * 3);
    CHECK(qp.collision_rows == 0);
    CHECK(qp.num_ineq() == 2 * 9 * (timing.h_b + 1));
    CHECK(qp.num_eq() == 6);  // velocity + auxiliary at HT+T
}

TEST_CASE("UAV at rest on its target: zero input is optimal") {
    const auto model = default_model();
    const auto timing = default_timing();
    const auto geom = identity_geom();
    const auto weights = make_weights(3, 1.0, 0.05, 0.01, 0.01);
    const Condenser condenser(model, timing);

    SwarmBuffer buffer;
    buffer.plans.push_back(stationary(model, timing, 0.5, -0.25, 1.0));
    buffer.last_replan_round.push_back(-1);
    buffer.current_round = 0;

    VectorXd target = VectorXd::Zero(9);
    target.head(3) << 0.5, -0.25, 1.0;
    const auto qp = assemble_qp(0, buffer, model, timing, geom, weights, target, condenser);

    const VectorXd zero = VectorXd::Zero(qp.num_vars());
    CHECK(check_feasible(qp, zero).max() <= 1e-12);
    CHECK(qp.objective(zero) == doctest::Approx(0.0));

    const auto sol = solve(qp);
    REQUIRE(sol.status == QpStatus::Optimal);
    CHECK(sol.objective <= 1e-8);
}

TEST_CASE("assembled hessians are symmetric positive definite") {
    const auto model = default_model();
    const auto timing = default_timing();
    const auto geom = identity_geom();
    const auto weights = make_weights(3, 1.0, 0.05, 0.01, 0.01);
    const Condenser condenser(model, timing);

    Scenario sc = generate_scenario(3, 2, VectorXd::Constant(3, -2.5), VectorXd::Constant(3, 2.5),
                                    geom, 99, 9);
    SwarmBuffer buffer = initial_plans(sc, model, timing);
    for (int i = 0; i < 3; ++i) {
        VectorXd target = VectorXd::Zero(9);
        target.head(3) = sc.targets[static_cast<std::size_t>(i)];
        const auto qp = assemble_qp(i, buffer, model, timing, geom, weights, target, condenser);
        CHECK((qp.hessian - qp.hessian.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(qp.hessian);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
        CHECK(qp.collision_rows == 2 * (timing.h_c + 1));
    }
}

TEST_CASE("shifted previous plans are feasible points of the next QP") {
    const auto model = default_model();
    const auto timing = default_timing();
    const auto geom = identity_geom();
    const auto weights = make_weights(3, 1.0, 0.05, 0.01, 0.01);

    SimConfig cfg{.model = model,
                  .timing = timing,
                  .geom = geom,
                  .weights = weights,
                  .trigger_kind = TriggerKind::Pbt,
                  .trigger_params = {},
                  .rounds = 8,
                  .arrival_tol = 0.05,
                  .qp = {}};
    const Scenario sc = generate_scenario(3, 2, VectorXd::Constant(3, -2.0),
                                          VectorXd::Constant(3, 2.0), geom, 4, 9);
    const auto result = run(sc, cfg, true);
    CHECK(result.theorem1.breaches == 0);
    CHECK(result.theorem1.checked > 0);
    CHECK(result.theorem1.max_violation <= 1e-9);
}
