#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "swarmplan/sim.hpp"

namespace swarmplan {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// One validated record holding every module's configuration. The structured
/// sections of the config file mirror the member names.
struct RunConfig {
    // model (triple-integrator preset; position box = flight space)
    double v_max = 2.0;
    double a_max = 3.0;
    double j_max = 8.0;

    TimingConfig timing;

    // geometry
    Eigen::VectorXd theta_diag = (Eigen::VectorXd(3) << 1.0, 1.0, 2.0).finished();
    double r_min = 0.3;
    double r_hat_min = 0.7;

    // weights
    double q_pos = 1.0;
    double q_vel = 0.05;
    double q_aux = 0.01;
    double r_input = 0.01;

    TriggerKind trigger_kind = TriggerKind::Pbt;
    PriorityParams trigger_params;

    // scenario
    int N = 2;
    int M = 1;
    Eigen::VectorXd space_min = (Eigen::VectorXd(3) << -2.5, -2.5, -2.5).finished();
    Eigen::VectorXd space_max = (Eigen::VectorXd(3) << 2.5, 2.5, 2.5).finished();

    // run
    int rounds = 60;
    int ensemble = 1;
    std::uint64_t seed_base = 1;
    std::string output_dir = "out";
    bool compare_triggers = false;
    double arrival_tol = 0.05;

    void validate();

    LinearModel make_model() const;
    ScaledGeometry make_geom() const;
    CostWeights make_cost() const;
    SimConfig make_sim_config() const;

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

/// Load and validate a config file. Unknown keys are rejected with a
/// field-addressed diagnostic.
RunConfig parse_config(const std::string& path);

}  // namespace swarmplan
