#include <CLI11.hpp>
#include <iostream>

#include "swarmplan/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"swarmplan: event-triggered swarm path-planning simulator"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "execute the configured run or ensemble");
    run_cmd->add_option("config", config_path, "config file (JSON)")->required();

    std::string history_path;
    auto* verify_cmd = app.add_subcommand("verify", "re-run guarantee checkers on a round log");
    verify_cmd->add_option("history-log", history_path, "history .jsonl written by run")->required();

    std::string gen_config_path;
    auto* gen_cmd = app.add_subcommand("gen-scenario", "emit the scenario for the configured seed");
    gen_cmd->add_option("config", gen_config_path, "config file (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed())
            return static_cast<int>(swarmplan::run_ensemble(swarmplan::parse_config(config_path)));
        if (verify_cmd->parsed()) return static_cast<int>(swarmplan::verify_log(history_path));
        if (gen_cmd->parsed())
            return static_cast<int>(swarmplan::emit_scenario(swarmplan::parse_config(gen_config_path)));
    } catch (const swarmplan::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
