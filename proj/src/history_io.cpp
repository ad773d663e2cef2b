#include "swarmplan/history_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

namespace swarmplan {

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vec_from_json(const json& j) {
    const auto arr = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(arr.data(), static_cast<Eigen::Index>(arr.size()));
}

const char* outcome_name(SolveOutcome o) {
    switch (o) {
        case SolveOutcome::NotAssigned: return "idle";
        case SolveOutcome::Replanned: return "replanned";
        case SolveOutcome::Fallback: return "fallback";
    }
    return "idle";
}

SolveOutcome outcome_from(const std::string& s) {
    if (s == "replanned") return SolveOutcome::Replanned;
    if (s == "fallback") return SolveOutcome::Fallback;
    return SolveOutcome::NotAssigned;
}

QpStatus status_from(const std::string& s) {
    if (s == "optimal") return QpStatus::Optimal;
    if (s == "infeasible") return QpStatus::Infeasible;
    return QpStatus::MaxIterations;
}

}  // namespace

void write_history(const std::string& path, const RunConfig& config, const RunHistory& history) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_history: cannot open '" + path + "'");

    json meta;
    meta["type"] = "meta";
    meta["config"] = config.to_json();
    json sc;
    sc["N"] = history.scenario.N;
    sc["M"] = history.scenario.M;
    sc["seed"] = history.scenario.seed;
    sc["space_min"] = vec_to_json(history.scenario.space_min);
    sc["space_max"] = vec_to_json(history.scenario.space_max);
    json inits = json::array(), targets = json::array();
    for (const auto& x : history.scenario.initial_states) inits.push_back(vec_to_json(x));
    for (const auto& t : history.scenario.targets) targets.push_back(vec_to_json(t));
    sc["initial_states"] = inits;
    sc["targets"] = targets;
    meta["scenario"] = sc;
    out << meta.dump() << '\n';

    for (const RoundRecord& rec : history.rounds) {
        json r;
        r["type"] = "round";
        r["k"] = rec.round;
        json assign = json::array();
        for (const auto& [cu, uav] : rec.decision.assignment) assign.push_back({cu, uav});
        r["assignment"] = assign;
        json outc = json::array(), stat = json::array();
        for (std::size_t i = 0; i < rec.outcome.size(); ++i) {
            outc.push_back(outcome_name(rec.outcome[i]));
            stat.push_back(rec.decision.assigns(static_cast<int>(i))
                               ? to_string(rec.solver_status[i])
                               : "idle");
        }
        r["outcome"] = outc;
        r["status"] = stat;
        json plans = json::object();
        for (std::size_t i = 0; i < rec.outcome.size(); ++i) {
            if (rec.outcome[i] != SolveOutcome::Replanned) continue;
            json inputs = json::array();
            for (const auto& u : rec.buffer_after.plans[i].inputs) inputs.push_back(vec_to_json(u));
            plans[std::to_string(i)] = inputs;
        }
        r["new_plans"] = plans;
        out << r.dump() << '\n';
    }
}

LoadedHistory load_history(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_history: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_history: empty file");
    const json meta = json::parse(line);
    if (meta.value("type", "") != "meta") throw std::runtime_error("load_history: missing meta record");

    LoadedHistory loaded;
    loaded.config = RunConfig::from_json(meta.at("config"));
    const json& sc = meta.at("scenario");
    Scenario& scenario = loaded.history.scenario;
    scenario.N = sc.at("N").get<int>();
    scenario.M = sc.at("M").get<int>();
    scenario.seed = sc.at("seed").get<std::uint64_t>();
    scenario.space_min = vec_from_json(sc.at("space_min"));
    scenario.space_max = vec_from_json(sc.at("space_max"));
    for (const auto& x : sc.at("initial_states")) scenario.initial_states.push_back(vec_from_json(x));
    for (const auto& t : sc.at("targets")) scenario.targets.push_back(vec_from_json(t));

    const LinearModel model = loaded.config.make_model();
    const TimingConfig& timing = loaded.config.timing;
    loaded.history.initial_buffer = initial_plans(scenario, model, timing);

    SwarmBuffer buffer = loaded.history.initial_buffer;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json r = json::parse(line);
        if (r.value("type", "") != "round") throw std::runtime_error("load_history: bad record type");

        RoundRecord rec;
        rec.round = r.at("k").get<std::int64_t>();
        for (const auto& pair : r.at("assignment"))
            rec.decision.assignment.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
        for (const auto& o : r.at("outcome")) rec.outcome.push_back(outcome_from(o.get<std::string>()));
        for (const auto& s : r.at("status")) rec.solver_status.push_back(status_from(s.get<std::string>()));

        std::vector<CommitEntry> entries;
        for (const auto& [cu, uav] : rec.decision.assignment) {
            CommitEntry entry;
            entry.uav = uav;
            const std::string key = std::to_string(uav);
            if (r.at("new_plans").contains(key)) {
                std::vector<Eigen::VectorXd> inputs;
                for (const auto& u : r.at("new_plans").at(key)) inputs.push_back(vec_from_json(u));
                const Eigen::VectorXd origin = evaluate_plan(
                    buffer.plans[static_cast<std::size_t>(uav)], timing, 2 * timing.T);
                entry.plan = make_plan(model, timing, rec.round, origin, std::move(inputs));
            }
            entries.push_back(std::move(entry));
        }
        buffer = commit_round(buffer, rec.decision, entries, timing);
        rec.buffer_after = buffer;
        loaded.history.rounds.push_back(std::move(rec));
    }
    return loaded;
}

}  // namespace swarmplan
