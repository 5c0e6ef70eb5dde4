#pragma once

// Command-line front end. Configuration precedence, lowest to highest:
// built-in defaults, the --config file, --set overrides in command-line order,
// then --seed.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "experiments.hpp"
#include "fixtures.hpp"
#include "localization.hpp"
#include "netsim.hpp"

namespace cfl::cli {

inline constexpr std::uint64_t kDefaultSeed = 42;

enum class ExitCode : int { ok = 0, config_invalid = 1, io_failure = 2, all_failed = 3 };

struct Invocation {
    std::string subcommand;  // localize-once | trials | sweep | fixtures
    std::optional<std::string> config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::uint64_t seed = kDefaultSeed;
    std::string out_dir = ".";
    std::optional<std::string> scenario_path;  // localize-once: use this scenario instead of deploying
};

struct RunSettings {
    ExperimentConfig experiment;
    std::vector<Algorithm> algorithms{Algorithm::pcfl};
    std::vector<WeightingMode> modes{WeightingMode::literal};
    std::string sweep_param;
    std::vector<double> sweep_values;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double parse_number(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigInvalid("key '" + key + "': not a number: '" + text + "'");
}

}  // namespace detail

/// `key = value` lines; '#' starts a comment, blank lines are skipped.
inline std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigInvalid("config line " + std::to_string(line_no) + ": expected 'key = value'");
        out.emplace_back(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    return out;
}

inline void apply_setting(RunSettings& s, const std::string& key, const std::string& value) {
    auto& c = s.experiment;
    auto number = [&] { return detail::parse_number(key, value); };

    if (key == "algorithm") {
        s.algorithms.clear();
        for (const auto& a : detail::split_list(value)) {
            if (a == "pcfl") s.algorithms.push_back(Algorithm::pcfl);
            else if (a == "acfl") s.algorithms.push_back(Algorithm::acfl);
            else if (a == "trilateration") s.algorithms.push_back(Algorithm::trilateration);
            else throw ConfigInvalid("key 'algorithm': unknown algorithm '" + a + "'");
        }
        if (s.algorithms.empty()) throw ConfigInvalid("key 'algorithm': empty list");
    } else if (key == "weighting_mode") {
        s.modes.clear();
        for (const auto& m : detail::split_list(value)) {
            if (m == "literal") s.modes.push_back(WeightingMode::literal);
            else if (m == "inverse") s.modes.push_back(WeightingMode::inverse);
            else throw ConfigInvalid("key 'weighting_mode': unknown mode '" + m + "'");
        }
        if (s.modes.empty()) throw ConfigInvalid("key 'weighting_mode': empty list");
    } else if (key == "range_mode") {
        if (value == "global_R") c.localization.range_mode = RangeMode::global_r;
        else if (value == "per_anchor") c.localization.range_mode = RangeMode::per_anchor;
        else throw ConfigInvalid("key 'range_mode': expected global_R or per_anchor");
    } else if (key == "projection_colors") {
        if (value == "inherit") c.projection_colors = ProjectionColors::inherit;
        else if (value == "independent") c.projection_colors = ProjectionColors::independent;
        else throw ConfigInvalid("key 'projection_colors': expected inherit or independent");
    } else if (key == "sweep_param") {
        s.sweep_param = value;
    } else if (key == "sweep_values") {
        s.sweep_values.clear();
        for (const auto& v : detail::split_list(value)) s.sweep_values.push_back(detail::parse_number(key, v));
    } else if (key == "threads") {
        const double v = number();
        if (!(v >= 0.0) || v != std::floor(v)) throw ConfigInvalid("key 'threads': expected a nonnegative integer");
        c.threads = static_cast<unsigned>(v);
    } else if (key == "region_x" || key == "region_y" || key == "region_z" || key == "comm_range" ||
               key == "d_anchor" || key == "anchor_count" || key == "mobile_count" || key == "sample_count" ||
               key == "threshold" || key == "trials" || key == "speed" || key == "staleness_delay" ||
               key == "aoa_sigma" || key == "depth_sigma") {
        try {
            apply_parameter(c, key, number());
        } catch (const ConfigInvalid& e) {
            throw ConfigInvalid("key '" + key + "': " + e.what());
        }
    } else {
        throw ConfigInvalid("unknown config key '" + key + "'");
    }
}

/// Defaults, then the config file, then overrides, then the seed.
inline RunSettings resolve_settings(const Invocation& inv) {
    RunSettings s;
    if (inv.config_path) {
        std::ifstream in(*inv.config_path);
        if (!in) throw IoFailure("cannot read config '" + *inv.config_path + "'");
        for (const auto& [k, v] : parse_config(in)) apply_setting(s, k, v);
    }
    for (const auto& [k, v] : inv.overrides) apply_setting(s, k, v);
    s.experiment.seed = inv.seed;
    validate(s.experiment);
    return s;
}

namespace detail {

inline std::filesystem::path prepare_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoFailure("cannot create output directory '" + dir + "': " + ec.message());
    return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoFailure("failed writing '" + path.string() + "'");
}

inline bool every_node_failed(std::span<const ResultRow> rows) {
    return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.stats.per_trial.empty(); });
}

inline ExitCode run_fixtures(const Invocation& inv, std::ostream& out) {
    const auto dir = prepare_out_dir(inv.out_dir);
    const std::pair<const char*, Scenario> files[] = {
        {"three_anchor_fixture.txt", fixtures::three_anchor()},
        {"under_anchor_fixture.txt", fixtures::under_anchor()},
    };
    for (const auto& [name, scenario] : files) {
        std::ostringstream text;
        write_scenario(text, scenario);
        write_text(dir / name, text.str());
        out << "wrote " << (dir / name).string() << '\n';
    }
    return ExitCode::ok;
}

inline ExitCode run_localize_once(const Invocation& inv, const RunSettings& s, std::ostream& out) {
    const auto& c = s.experiment;
    Scenario scenario;
    if (inv.scenario_path) {
        std::ifstream in(*inv.scenario_path);
        if (!in) throw IoFailure("cannot read scenario '" + *inv.scenario_path + "'");
        try {
            scenario = read_scenario(in);
        } catch (const std::invalid_argument& e) {
            throw ConfigInvalid(e.what());
        }
    } else {
        scenario = deploy(c.region, resolved_anchor_count(c), c.mobile_count, c.comm_range,
                          derive_seed(c.seed, {tag(StreamTag::deploy), 0}), c.projection_colors);
    }

    std::ostringstream csv;
    csv << "mobile_id,algorithm,weighting_mode,true_x,true_y,true_z,est_x,est_y,est_z,error_m,filtered,fallback,"
           "status\n";
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-6s %-14s %-8s %10s %10s %10s %9s %s\n", "node", "algorithm", "weights",
                  "est_x", "est_y", "est_z", "error_m", "status");
    out << buf;

    bool any_located = false;
    for (const auto& m : scenario.mobiles) {
        const auto input = observe(scenario, m.id, c.noise);
        for (auto algorithm : s.algorithms) {
            for (std::size_t i = 0; i < s.modes.size(); ++i) {
                if (algorithm == Algorithm::trilateration && i > 0) break;
                const auto mode = s.modes[i];
                const std::string mode_name =
                    algorithm == Algorithm::trilateration ? "none" : std::string(to_string(mode));
                std::optional<Estimate> est;
                std::string status = "ok";
                try {
                    if (algorithm == Algorithm::trilateration) {
                        est = baseline_trilateration(input);
                    } else {
                        LocalizationConfig loc = c.localization;
                        loc.variant = algorithm == Algorithm::acfl ? Variant::acfl : Variant::pcfl;
                        loc.weighting = mode;
                        Rng rng = make_rng(c.seed, {tag(StreamTag::localize), 0, static_cast<std::uint64_t>(m.id)});
                        est = localize(input, loc, rng);
                        if (est->fallback_used) status = "fallback";
                    }
                } catch (const InsufficientAnchors&) {
                    status = "insufficient_anchors";
                } catch (const NoUsableAnchor&) {
                    status = "insufficient_anchors";
                } catch (const EmptyIntersection&) {
                    status = "empty_intersection";
                } catch (const SingularGeometry&) {
                    status = "singular_geometry";
                }

                const auto& p = m.position;
                if (est) {
                    any_located = true;
                    const double err = localization_error(p, est->position);
                    std::snprintf(buf, sizeof buf, "%d,%s,%s,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%zu,%d,%s\n", m.id,
                                  std::string(to_string(algorithm)).c_str(), mode_name.c_str(), p.x, p.y, p.z,
                                  est->position.x, est->position.y, est->position.z, err, est->filtered_count,
                                  est->fallback_used ? 1 : 0, status.c_str());
                    csv << buf;
                    std::snprintf(buf, sizeof buf, "%-6d %-14s %-8s %10.3f %10.3f %10.3f %9.4f %s\n", m.id,
                                  std::string(to_string(algorithm)).c_str(), mode_name.c_str(), est->position.x,
                                  est->position.y, est->position.z, err, status.c_str());
                } else {
                    std::snprintf(buf, sizeof buf, "%d,%s,%s,%.6g,%.6g,%.6g,,,,,0,0,%s\n", m.id,
                                  std::string(to_string(algorithm)).c_str(), mode_name.c_str(), p.x, p.y, p.z,
                                  status.c_str());
                    csv << buf;
                    std::snprintf(buf, sizeof buf, "%-6d %-14s %-8s %10s %10s %10s %9s %s\n", m.id,
                                  std::string(to_string(algorithm)).c_str(), mode_name.c_str(), "-", "-", "-", "-",
                                  status.c_str());
                }
                out << buf;
            }
        }
    }

    const auto dir = prepare_out_dir(inv.out_dir);
    write_text(dir / "localize_once.csv", csv.str());
    return any_located ? ExitCode::ok : ExitCode::all_failed;
}

inline ExitCode run_experiment(const Invocation& inv, const RunSettings& s, std::ostream& out, bool sweep) {
    std::optional<SweepSpec> spec;
    if (sweep) {
        if (s.sweep_param.empty()) throw ConfigInvalid("sweep requires sweep_param");
        if (s.sweep_values.empty()) throw ConfigInvalid("sweep requires sweep_values");
        spec = SweepSpec{s.sweep_param, s.sweep_values};
        ExperimentConfig probe = s.experiment;
        for (double v : s.sweep_values) {
            apply_parameter(probe, s.sweep_param, v);
            validate(probe);
        }
    }
    const auto rows = run_plan(s.experiment, s.algorithms, s.modes, spec);

    const auto dir = prepare_out_dir(inv.out_dir);
    const auto path = dir / (sweep ? "sweep.csv" : "trials.csv");
    emit_csv(rows, path.string());
    out << format_summary(rows);
    out << "wrote " << path.string() << '\n';
    return every_node_failed(rows) ? ExitCode::all_failed : ExitCode::ok;
}

}  // namespace detail

/// Runs one CLI invocation; diagnostics go to `err`.
inline int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
    try {
        if (inv.subcommand == "fixtures") return static_cast<int>(detail::run_fixtures(inv, out));
        if (inv.subcommand != "localize-once" && inv.subcommand != "trials" && inv.subcommand != "sweep")
            throw ConfigInvalid("unknown subcommand '" + inv.subcommand + "'");

        const auto settings = resolve_settings(inv);
        ExitCode code;
        if (inv.subcommand == "localize-once")
            code = detail::run_localize_once(inv, settings, out);
        else
            code = detail::run_experiment(inv, settings, out, inv.subcommand == "sweep");
        if (code == ExitCode::all_failed) err << "error: no mobile node could be localized\n";
        return static_cast<int>(code);
    } catch (const ConfigInvalid& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::config_invalid);
    } catch (const IoFailure& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::io_failure);
    }
}

}  // namespace cfl::cli
