#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "swarmplan/sim.hpp"

using namespace swarmplan;
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

ScaledGeometry default_geom() {
    return make_geometry((VectorXd(3) << 1.0, 1.0, 2.0).finished(), 0.3, 0.7);
}

SimConfig make_config(TriggerKind kind, int rounds) {
    return SimConfig{.model = default_model(),
                     .timing = default_timing(),
                     .geom = default_geom(),
                     .weights = make_weights(3, 1.0, 0.05, 0.01, 0.01),
                     .trigger_kind = kind,
                     .trigger_params = {},
                     .rounds = rounds,
                     .arrival_tol = 0.05,
                     .qp = {}};
}

}  // namespace

TEST_CASE("single UAV flies to its target and stays") {
    const auto cfg = make_config(TriggerKind::Pbt, 40);
    Scenario sc;
    sc.N = 1;
    sc.M = 1;
    sc.space_min = VectorXd::Constant(3, -2.5);
    sc.space_max = VectorXd::Constant(3, 2.5);
    VectorXd x0 = VectorXd::Zero(9);
    x0.head(3) << -1.5, 0.5, -1.0;
    sc.initial_states = {x0};
    sc.targets = {(VectorXd(3) << 1.5, -0.5, 1.0).finished()};

    const auto res = run(sc, cfg, true);
    REQUIRE(static_cast<int>(res.history.rounds.size()) == 40);
    CHECK(res.metrics.success[0] == 1);
    CHECK(res.metrics.arrival_round[0] >= 1);
    CHECK(res.metrics.success_rate == 1.0);
    const double start_dist = (x0.head(3) - sc.targets[0]).norm();
    CHECK(res.metrics.mean_distance.front() == doctest::Approx(start_dist));
    CHECK(res.metrics.mean_distance.back() <= cfg.arrival_tol);
    CHECK(res.theorem1.breaches == 0);
    CHECK(res.lemma1.clean());
}

TEST_CASE("two crossing UAVs never breach the buffered separation") {
    const auto cfg = make_config(TriggerKind::Pbt, 50);
    Scenario sc;
    sc.N = 2;
    sc.M = 1;
    sc.space_min = VectorXd::Constant(3, -2.5);
    sc.space_max = VectorXd::Constant(3, 2.5);
    VectorXd a = VectorXd::Zero(9), b = VectorXd::Zero(9);
    a.head(3) << -1.5, 0.3, 0.0;
    b.head(3) << 1.5, -0.3, 0.0;
    sc.initial_states = {a, b};
    // Swap sides: the straight-line paths cross near the middle.
    sc.targets = {(VectorXd(3) << 1.5, -0.3, 0.0).finished(),
                  (VectorXd(3) << -1.5, 0.3, 0.0).finished()};

    const auto res = run(sc, cfg, true);
    CHECK(res.lemma1.sample_violations == 0);
    CHECK(res.theorem2.dense_violations == 0);
    CHECK(res.lemma1.min_scaled_distance_at_samples >= cfg.geom.r_hat_min - 1e-6);
    CHECK(res.metrics.success_rate == 1.0);
}

TEST_CASE("a perfectly symmetric head-on pair deadlocks safely and is reported") {
    // Long enough that the trailing no-progress window falls after the
    // mutual block settles.
    const auto cfg = make_config(TriggerKind::Pbt, 70);
    Scenario sc;
    sc.N = 2;
    sc.M = 1;
    sc.space_min = VectorXd::Constant(3, -2.5);
    sc.space_max = VectorXd::Constant(3, 2.5);
    VectorXd a = VectorXd::Zero(9), b = VectorXd::Zero(9);
    a.head(3) << -1.5, 0.0, 0.0;
    b.head(3) << 1.5, 0.0, 0.0;
    sc.initial_states = {a, b};
    sc.targets = {(VectorXd(3) << 1.5, 0.0, 0.0).finished(),
                  (VectorXd(3) << -1.5, 0.0, 0.0).finished()};

    const auto res = run(sc, cfg, true);
    // Mutual blocking on the axis of symmetry: no progress, but never a
    // separation breach, and the stall is flagged.
    CHECK(res.lemma1.sample_violations == 0);
    CHECK(res.theorem2.dense_violations == 0);
    CHECK(res.metrics.success_rate < 1.0);
    CHECK((res.metrics.deadlocked[0] == 1 || res.metrics.deadlocked[1] == 1));
}

TEST_CASE("every round replans exactly min(M, N) UAVs") {
    auto cfg = make_config(TriggerKind::Pbt, 6);
    const Scenario sc = generate_scenario(5, 3, VectorXd::Constant(3, -2.0),
                                          VectorXd::Constant(3, 2.0), cfg.geom, 8, 9);
    const auto res = run(sc, cfg, false);
    for (const auto& rec : res.history.rounds) {
        CHECK(rec.decision.assignment.size() == 3);
        int replanned = 0;
        for (const auto o : rec.outcome)
            if (o != SolveOutcome::NotAssigned) ++replanned;
        CHECK(replanned == 3);
    }
}

TEST_CASE("round-robin and priority triggers share the deterministic core") {
    auto cfg_rr = make_config(TriggerKind::RoundRobin, 8);
    const Scenario sc = generate_scenario(4, 2, VectorXd::Constant(3, -2.0),
                                          VectorXd::Constant(3, 2.0), cfg_rr.geom, 3, 9);
    const auto a = run(sc, cfg_rr, false);
    const auto b = run(sc, cfg_rr, false);
    REQUIRE(a.history.rounds.size() == b.history.rounds.size());
    for (std::size_t r = 0; r < a.history.rounds.size(); ++r) {
        CHECK(a.history.rounds[r].decision.assignment == b.history.rounds[r].decision.assignment);
        const auto& pa = a.history.rounds[r].buffer_after.plans;
        const auto& pb = b.history.rounds[r].buffer_after.plans;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            for (std::size_t j = 0; j < pa[i].states.size(); ++j)
                CHECK(pa[i].states[j] == pb[i].states[j]);  // bitwise
        }
    }

    // Round-robin assignment pattern is the arithmetic stride.
    for (std::size_t r = 0; r < a.history.rounds.size(); ++r) {
        const auto expect = select_round_robin(static_cast<std::int64_t>(r), 4, 2);
        CHECK(a.history.rounds[r].decision.assignment == expect.assignment);
    }
}

TEST_CASE("an untriggered UAV executes the shift chain down to a standstill") {
    // One distant idle UAV with N > M never wins the priority competition
    // once the others still move; after its plan drains it must hover.
    auto cfg = make_config(TriggerKind::Pbt, 20);
    cfg.trigger_params.alpha2 = 0.0;  // no waiting-time boost: idler never triggers
    Scenario sc;
    sc.N = 3;
    sc.M = 1;
    sc.space_min = VectorXd::Constant(3, -2.5);
    sc.space_max = VectorXd::Constant(3, 2.5);
    std::vector<VectorXd> inits;
    for (int i = 0; i < 3; ++i) {
        VectorXd x = VectorXd::Zero(9);
        x.head(3) << -1.5 + 1.5 * i, -1.5, 0.0;
        inits.push_back(x);
    }
    sc.initial_states = inits;
    sc.targets = {(VectorXd(3) << -1.5, -1.5, 0.0).finished(),   // UAV 0 already home
                  (VectorXd(3) << 0.0, 1.8, 0.0).finished(),
                  (VectorXd(3) << 1.5, 1.8, 0.0).finished()};

    const auto res = run(sc, cfg, false);
    // Find a stretch of >= H rounds where UAV 0 is never assigned.
    int streak = 0, end = -1;
    for (std::size_t r = 0; r < res.history.rounds.size(); ++r) {
        if (res.history.rounds[r].decision.assigns(0)) {
            streak = 0;
        } else if (++streak >= cfg.timing.H) {
            end = static_cast<int>(r);
            break;
        }
    }
    REQUIRE(end >= 0);
    const auto& plan = res.history.rounds[static_cast<std::size_t>(end)]
                           .buffer_after.plans[0];
    for (const auto& u : plan.inputs) CHECK(u.cwiseAbs().maxCoeff() == 0.0);
    for (const auto& x : plan.states) {
        CHECK(x.segment(3, 3).cwiseAbs().maxCoeff() == 0.0);  // zero velocity
        CHECK(x == plan.states.front());
    }
}

TEST_CASE("boundary states follow the committed activation samples") {
    auto cfg = make_config(TriggerKind::Pbt, 5);
    const Scenario sc = generate_scenario(3, 2, VectorXd::Constant(3, -2.0),
                                          VectorXd::Constant(3, 2.0), cfg.geom, 19, 9);
    const auto res = run(sc, cfg, false);

    const auto b0 = boundary_states(res.history, cfg.timing, 0);
    for (int i = 0; i < 3; ++i)
        CHECK(b0[static_cast<std::size_t>(i)] == sc.initial_states[static_cast<std::size_t>(i)]);

    for (int r = 1; r <= 5; ++r) {
        const auto br = boundary_states(res.history, cfg.timing, r);
        const auto& buf = res.history.rounds[static_cast<std::size_t>(r - 1)].buffer_after;
        for (int i = 0; i < 3; ++i)
            CHECK(br[static_cast<std::size_t>(i)] ==
                  buf.plans[static_cast<std::size_t>(i)].states.front());
    }
}

TEST_CASE("metrics: arrival requires staying within twice the tolerance") {
    // Hand-built distance series via a tiny fake history is overkill; use the
    // real pipeline instead and check internal consistency.
    auto cfg = make_config(TriggerKind::Pbt, 30);
    const Scenario sc = generate_scenario(3, 2, VectorXd::Constant(3, -2.0),
                                          VectorXd::Constant(3, 2.0), cfg.geom, 31, 9);
    const auto res = run(sc, cfg, false);
    const auto& m = res.metrics;
    for (int i = 0; i < 3; ++i) {
        if (m.arrival_round[static_cast<std::size_t>(i)] < 0) continue;
        const int r0 = m.arrival_round[static_cast<std::size_t>(i)];
        for (int r = r0; r <= 30; ++r) {
            const auto states = boundary_states(res.history, cfg.timing, r);
            const double d = (states[static_cast<std::size_t>(i)].head(3) -
                              sc.targets[static_cast<std::size_t>(i)])
                                 .norm();
            CHECK(d <= 2.0 * cfg.arrival_tol + 1e-12);
        }
    }
    int successes = 0;
    for (const auto s : m.success) successes += s;
    CHECK(m.success_rate == doctest::Approx(successes / 3.0));
}
