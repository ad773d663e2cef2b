#include "swarmplan/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <nlohmann/json.hpp>
#include <thread>

#include "swarmplan/history_io.hpp"

namespace swarmplan {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* kind_tag(TriggerKind k) { return k == TriggerKind::Pbt ? "pbt" : "round_robin"; }

struct ScenarioResult {
    std::uint64_t seed = 0;
    TriggerKind kind = TriggerKind::Pbt;
    RunResult result;
    bool packing_failed = false;
};

// Trajectory CSV: one row per (round boundary, UAV).
void write_trajectory(const fs::path& path, const ScenarioResult& sr, const TimingConfig& timing,
                      int pos_dim) {
    std::ofstream out(path);
    out << "seed,round,time_s,uav,px,py,pz,vx,vy,vz,dist_to_target,replanned,solver_status\n";
    const RunHistory& h = sr.result.history;
    const int rounds = static_cast<int>(h.rounds.size());
    for (int r = 0; r <= rounds; ++r) {
        const auto states = boundary_states(h, timing, r);
        for (int i = 0; i < h.scenario.N; ++i) {
            const Eigen::VectorXd& x = states[static_cast<std::size_t>(i)];
            const double dist =
                (x.head(pos_dim) - h.scenario.targets[static_cast<std::size_t>(i)]).norm();
            int replanned = 0;
            std::string status = "init";
            if (r > 0) {
                const RoundRecord& rec = h.rounds[static_cast<std::size_t>(r - 1)];
                replanned = rec.outcome[static_cast<std::size_t>(i)] == SolveOutcome::Replanned;
                status = rec.decision.assigns(i)
                             ? to_string(rec.solver_status[static_cast<std::size_t>(i)])
                             : "idle";
            }
            out << sr.seed << ',' << r << ',' << fmt(timing.seconds(timing.T) * r) << ',' << i;
            for (int c = 0; c < pos_dim; ++c) out << ',' << fmt(x(c));
            for (int c = 0; c < pos_dim; ++c) out << ',' << fmt(x(pos_dim + c));
            out << ',' << fmt(dist) << ',' << replanned << ',' << status << '\n';
        }
    }
}

json verification_json(const RunResult& res) {
    json v;
    v["lemma1"] = {{"min_scaled_distance_at_samples", res.lemma1.min_scaled_distance_at_samples},
                   {"violations", res.lemma1.sample_violations}};
    v["theorem2"] = {{"min_scaled_distance_dense", res.theorem2.min_scaled_distance_dense},
                     {"violations", res.theorem2.dense_violations},
                     {"guarantee_configured", res.theorem2.guarantee_configured},
                     {"delta_p_max", res.theorem2.delta_p_max}};
    v["theorem1"] = {{"checked", res.theorem1.checked},
                     {"breaches", res.theorem1.breaches},
                     {"max_violation", res.theorem1.max_violation},
                     {"infeasible_solves", res.theorem1.infeasible_solves}};
    v["metrics"] = {{"success_rate", res.metrics.success_rate},
                    {"final_mean_distance", res.metrics.mean_distance.back()}};
    return v;
}

bool run_violates(const RunResult& res) {
    return res.lemma1.sample_violations > 0 ||
           (res.theorem2.guarantee_configured && res.theorem2.dense_violations > 0);
}

}  // namespace

RunOutcome run_ensemble(const RunConfig& config) {
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::cerr << "cannot create output directory '" << config.output_dir << "'\n";
        return RunOutcome::ConfigError;
    }

    // Effective-config echo plus run metadata (the one file with timestamps).
    {
        json meta;
        meta["effective_config"] = config.to_json();
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        meta["started_unix_s"] =
            std::chrono::duration_cast<std::chrono::seconds>(now).count();
        std::ofstream(dir / "run_metadata.json") << meta.dump(2) << '\n';
    }

    std::vector<TriggerKind> kinds;
    if (config.compare_triggers)
        kinds = {TriggerKind::Pbt, TriggerKind::RoundRobin};
    else
        kinds = {config.trigger_kind};

    const ScaledGeometry geom = config.make_geom();
    const int state_dim = static_cast<int>(config.theta_diag.size()) * 3;

    struct Job {
        std::uint64_t seed;
        TriggerKind kind;
    };
    std::vector<Job> jobs;
    for (int e = 0; e < config.ensemble; ++e)
        for (TriggerKind k : kinds) jobs.push_back({config.seed_base + static_cast<std::uint64_t>(e), k});

    std::vector<ScenarioResult> results(jobs.size());
    const unsigned workers =
        std::max(1u, std::min(std::thread::hardware_concurrency(), static_cast<unsigned>(jobs.size())));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t idx = next.fetch_add(1);
                if (idx >= jobs.size()) return;
                ScenarioResult& sr = results[idx];
                sr.seed = jobs[idx].seed;
                sr.kind = jobs[idx].kind;
                try {
                    const Scenario sc = generate_scenario(config.N, config.M, config.space_min,
                                                          config.space_max, geom, sr.seed, state_dim);
                    SimConfig sim = config.make_sim_config();
                    sim.trigger_kind = sr.kind;
                    sr.result = run(sc, sim, true);
                } catch (const PackingFailure&) {
                    sr.packing_failed = true;
                }
            }
        });
    }
    for (auto& t : pool) t.join();

    bool packing_failed = false;
    std::optional<std::pair<std::uint64_t, std::string>> violation;
    for (const ScenarioResult& sr : results) {
        if (sr.packing_failed) {
            packing_failed = true;
            continue;
        }
        const std::string tag = std::string(kind_tag(sr.kind)) + "_" + std::to_string(sr.seed);
        write_trajectory(dir / ("traj_" + tag + ".csv"), sr, config.timing, geom.dim());
        std::ofstream(dir / ("verify_" + tag + ".json")) << verification_json(sr.result).dump(2) << '\n';
        write_history((dir / ("history_" + tag + ".jsonl")).string(), config, sr.result.history);
        if (run_violates(sr.result) && !violation) {
            const auto& site = sr.result.lemma1.first_violation
                                   ? sr.result.lemma1.first_violation
                                   : sr.result.theorem2.first_violation;
            std::string what = "separation violation";
            if (site)
                what = "round " + std::to_string(site->round) + " pair (" +
                       std::to_string(site->uav_i) + "," + std::to_string(site->uav_j) + ")";
            violation = {sr.seed, what};
        }
    }

    // Ensemble CSV: per-round mean distance averaged over scenarios, one
    // column pair per trigger kind; rows sorted by round.
    {
        std::ofstream out(dir / "ensemble.csv");
        out << "round,time_s";
        for (TriggerKind k : kinds) out << ",mean_distance_" << kind_tag(k);
        out << '\n';
        for (int r = 0; r <= config.rounds; ++r) {
            out << r << ',' << fmt(config.timing.seconds(config.timing.T) * r);
            for (TriggerKind k : kinds) {
                double sum = 0.0;
                int count = 0;
                for (const ScenarioResult& sr : results) {
                    if (sr.kind != k || sr.packing_failed) continue;
                    sum += sr.result.metrics.mean_distance[static_cast<std::size_t>(r)];
                    ++count;
                }
                out << ',' << fmt(count > 0 ? sum / count : 0.0);
            }
            out << '\n';
        }
    }
    {
        json summary;
        for (TriggerKind k : kinds) {
            double success = 0.0, deadlocks = 0.0;
            int count = 0;
            for (const ScenarioResult& sr : results) {
                if (sr.kind != k || sr.packing_failed) continue;
                success += sr.result.metrics.success_rate;
                for (auto dl : sr.result.metrics.deadlocked) deadlocks += dl;
                ++count;
            }
            summary[kind_tag(k)] = {{"scenarios", count},
                                    {"mean_success_rate", count ? success / count : 0.0},
                                    {"total_deadlocks", deadlocks}};
        }
        std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
    }

    if (violation) {
        std::cerr << "guarantee violation in seed " << violation->first << ": " << violation->second
                  << '\n';
        return RunOutcome::GuaranteeViolation;
    }
    if (packing_failed) {
        std::cerr << "scenario packing failed for at least one seed\n";
        return RunOutcome::PackingFailure;
    }
    return RunOutcome::Ok;
}

RunOutcome verify_log(const std::string& history_path) {
    LoadedHistory loaded;
    try {
        loaded = load_history(history_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return RunOutcome::ConfigError;
    }
    const RunConfig& c = loaded.config;
    const LinearModel model = c.make_model();
    const ScaledGeometry geom = c.make_geom();

    const SeparationReport l1 = check_lemma1(loaded.history, geom, c.timing);
    const SeparationReport t2 = check_theorem2(loaded.history, model, geom, c.timing);
    const TheoremOneReport t1 = check_theorem1(loaded.history, model, c.timing, geom, c.make_cost(),
                                               loaded.history.scenario.targets);

    std::cout << "lemma1:   min sample-point scaled distance " << l1.min_scaled_distance_at_samples
              << ", violations " << l1.sample_violations << '\n';
    std::cout << "theorem2: min dense scaled distance " << t2.min_scaled_distance_dense
              << ", violations " << t2.dense_violations << ", guarantee "
              << (t2.guarantee_configured ? "configured" : "not configured") << " (delta_p_max "
              << t2.delta_p_max << ")\n";
    std::cout << "theorem1: " << t1.checked << " shifted-plan checks, " << t1.breaches
              << " breaches, max violation " << t1.max_violation << '\n';

    if (l1.sample_violations > 0 || (t2.guarantee_configured && t2.dense_violations > 0))
        return RunOutcome::GuaranteeViolation;
    return RunOutcome::Ok;
}

RunOutcome emit_scenario(const RunConfig& config) {
    const ScaledGeometry geom = config.make_geom();
    const int state_dim = static_cast<int>(config.theta_diag.size()) * 3;
    Scenario sc;
    try {
        sc = generate_scenario(config.N, config.M, config.space_min, config.space_max, geom,
                               config.seed_base, state_dim);
    } catch (const PackingFailure& e) {
        std::cerr << e.what() << '\n';
        return RunOutcome::PackingFailure;
    }
    json j;
    j["N"] = sc.N;
    j["M"] = sc.M;
    j["seed"] = sc.seed;
    json inits = json::array(), targets = json::array();
    for (const auto& x : sc.initial_states)
        inits.push_back(std::vector<double>(x.data(), x.data() + x.size()));
    for (const auto& t : sc.targets)
        targets.push_back(std::vector<double>(t.data(), t.data() + t.size()));
    j["initial_states"] = inits;
    j["targets"] = targets;
    std::cout << j.dump(2) << '\n';
    return RunOutcome::Ok;
}

}  // namespace swarmplan
