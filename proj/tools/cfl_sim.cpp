#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfl/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Color-filtering localization simulator for underwater acoustic sensor networks"};

    cfl::cli::Invocation inv;
    std::string config;
    std::string scenario;
    std::vector<std::string> sets;

    app.add_option("subcommand", inv.subcommand, "localize-once | trials | sweep | fixtures")
        ->required()
        ->check(CLI::IsMember({"localize-once", "trials", "sweep", "fixtures"}));
    app.add_option("--config", config, "key = value configuration file");
    app.add_option("--set", sets, "override, key=value (repeatable)")->take_all();
    app.add_option("--seed", inv.seed, "master seed")->capture_default_str();
    app.add_option("--out", inv.out_dir, "output directory")->capture_default_str();
    app.add_option("--scenario", scenario, "scenario file for localize-once");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(cfl::cli::ExitCode::config_invalid);
    }

    if (!config.empty()) inv.config_path = config;
    if (!scenario.empty()) inv.scenario_path = scenario;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: --set expects key=value, got '" << s << "'\n";
            return static_cast<int>(cfl::cli::ExitCode::config_invalid);
        }
        inv.overrides.emplace_back(cfl::cli::detail::trim(s.substr(0, eq)), cfl::cli::detail::trim(s.substr(eq + 1)));
    }
    return cfl::cli::run(inv, std::cout, std::cerr);
}
