#include "swarmplan/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

namespace swarmplan {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& section, const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + (section.empty() ? it.key() : section + "." + it.key()) +
                              "'");
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void read_vec(const json& j, const std::string& section, const char* key, Eigen::VectorXd& out) {
    if (!j.contains(key)) return;
    const auto arr = j.at(key).get<std::vector<double>>();
    if (arr.empty()) throw ConfigError(section + "." + key + ": empty array");
    out = Eigen::Map<const Eigen::VectorXd>(arr.data(), static_cast<Eigen::Index>(arr.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

void RunConfig::validate() {
    timing.validate();
    make_model();  // throws on bad boxes
    make_geom().validate();
    trigger_params.validate();
    make_cost().validate(static_cast<int>(theta_diag.size()) * 3,
                         static_cast<int>(theta_diag.size()));
    if (N < 1 || M < 1) throw ConfigError("scenario: N and M must be >= 1");
    if (space_min.size() != theta_diag.size() || space_max.size() != theta_diag.size())
        throw ConfigError("scenario: space box dimension must match geometry");
    if (((space_max - space_min).array() <= 0.0).any())
        throw ConfigError("scenario: space box must have positive extent");
    if (rounds < 1) throw ConfigError("run: rounds must be >= 1");
    if (ensemble < 1) throw ConfigError("run: ensemble must be >= 1");
    if (arrival_tol <= 0.0) throw ConfigError("run: arrival_tol must be positive");
}

LinearModel RunConfig::make_model() const {
    try {
        return triple_integrator(space_min, space_max, v_max, a_max, j_max);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
}

ScaledGeometry RunConfig::make_geom() const {
    try {
        return make_geometry(theta_diag, r_min, r_hat_min);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("geometry: ") + e.what());
    }
}

CostWeights RunConfig::make_cost() const {
    return make_weights(static_cast<int>(theta_diag.size()), q_pos, q_vel, q_aux, r_input);
}

SimConfig RunConfig::make_sim_config() const {
    SimConfig sc{.model = make_model(),
                 .timing = timing,
                 .geom = make_geom(),
                 .weights = make_cost(),
                 .trigger_kind = trigger_kind,
                 .trigger_params = trigger_params,
                 .rounds = rounds,
                 .arrival_tol = arrival_tol,
                 .qp = {}};
    return sc;
}

json RunConfig::to_json() const {
    json j;
    j["model"] = {{"v_max", v_max}, {"a_max", a_max}, {"j_max", j_max}};
    j["timing"] = {{"tick_s", timing.tick_s}, {"T", timing.T},     {"T_calc", timing.T_calc},
                   {"T_com", timing.T_com},   {"Ts", timing.Ts},   {"To", timing.To},
                   {"Tb", timing.Tb},         {"Tc", timing.Tc},   {"H", timing.H},
                   {"base_step", timing.base_step}};
    j["geometry"] = {{"theta_diag", to_std(theta_diag)}, {"r_min", r_min}, {"r_hat_min", r_hat_min}};
    j["weights"] = {{"q_pos", q_pos}, {"q_vel", q_vel}, {"q_aux", q_aux}, {"r", r_input}};
    j["trigger"] = {{"kind", trigger_kind == TriggerKind::Pbt ? "pbt" : "round_robin"},
                    {"alpha1", trigger_params.alpha1},
                    {"alpha2", trigger_params.alpha2},
                    {"alpha3", trigger_params.alpha3},
                    {"beta", trigger_params.beta}};
    j["scenario"] = {{"N", N},
                     {"M", M},
                     {"space_min", to_std(space_min)},
                     {"space_max", to_std(space_max)}};
    j["run"] = {{"rounds", rounds},          {"ensemble", ensemble},
                {"seed_base", seed_base},    {"output_dir", output_dir},
                {"compare_triggers", compare_triggers}, {"arrival_tol", arrival_tol}};
    return j;
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig c;
    require_keys(j, "", {"model", "timing", "geometry", "weights", "trigger", "scenario", "run",
                         "N", "M"});
    read(j, "N", c.N);
    read(j, "M", c.M);

    if (j.contains("model")) {
        const json& m = j.at("model");
        require_keys(m, "model", {"v_max", "a_max", "j_max"});
        read(m, "v_max", c.v_max);
        read(m, "a_max", c.a_max);
        read(m, "j_max", c.j_max);
    }
    if (j.contains("timing")) {
        const json& t = j.at("timing");
        require_keys(t, "timing",
                     {"tick_s", "T", "T_calc", "T_com", "Ts", "To", "Tb", "Tc", "H", "base_step"});
        read(t, "tick_s", c.timing.tick_s);
        read(t, "T", c.timing.T);
        read(t, "T_calc", c.timing.T_calc);
        read(t, "T_com", c.timing.T_com);
        read(t, "Ts", c.timing.Ts);
        read(t, "To", c.timing.To);
        read(t, "Tb", c.timing.Tb);
        read(t, "Tc", c.timing.Tc);
        read(t, "H", c.timing.H);
        read(t, "base_step", c.timing.base_step);
    }
    if (j.contains("geometry")) {
        const json& g = j.at("geometry");
        require_keys(g, "geometry", {"theta_diag", "r_min", "r_hat_min"});
        read_vec(g, "geometry", "theta_diag", c.theta_diag);
        read(g, "r_min", c.r_min);
        read(g, "r_hat_min", c.r_hat_min);
    }
    if (j.contains("weights")) {
        const json& w = j.at("weights");
        require_keys(w, "weights", {"q_pos", "q_vel", "q_aux", "r"});
        read(w, "q_pos", c.q_pos);
        read(w, "q_vel", c.q_vel);
        read(w, "q_aux", c.q_aux);
        read(w, "r", c.r_input);
    }
    if (j.contains("trigger")) {
        const json& t = j.at("trigger");
        require_keys(t, "trigger", {"kind", "alpha1", "alpha2", "alpha3", "beta"});
        if (t.contains("kind")) {
            const std::string kind = t.at("kind").get<std::string>();
            if (kind == "pbt")
                c.trigger_kind = TriggerKind::Pbt;
            else if (kind == "round_robin")
                c.trigger_kind = TriggerKind::RoundRobin;
            else
                throw ConfigError("trigger.kind: expected 'pbt' or 'round_robin', got '" + kind + "'");
        }
        read(t, "alpha1", c.trigger_params.alpha1);
        read(t, "alpha2", c.trigger_params.alpha2);
        read(t, "alpha3", c.trigger_params.alpha3);
        read(t, "beta", c.trigger_params.beta);
    }
    if (j.contains("scenario")) {
        const json& s = j.at("scenario");
        require_keys(s, "scenario", {"N", "M", "space_min", "space_max"});
        read(s, "N", c.N);
        read(s, "M", c.M);
        read_vec(s, "scenario", "space_min", c.space_min);
        read_vec(s, "scenario", "space_max", c.space_max);
    }
    if (j.contains("run")) {
        const json& r = j.at("run");
        require_keys(r, "run",
                     {"rounds", "ensemble", "seed_base", "output_dir", "compare_triggers",
                      "arrival_tol"});
        read(r, "rounds", c.rounds);
        read(r, "ensemble", c.ensemble);
        read(r, "seed_base", c.seed_base);
        read(r, "output_dir", c.output_dir);
        read(r, "compare_triggers", c.compare_triggers);
        read(r, "arrival_tol", c.arrival_tol);
    }

    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    return RunConfig::from_json(j);
}

}  // namespace swarmplan
