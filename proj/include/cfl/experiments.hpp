#pragma once

// Monte-Carlo harness: per-trial deployment, localization of every mobile
// node, staleness-aware scoring, aggregate statistics, parameter sweeps and
// CSV output.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "localization.hpp"
#include "netsim.hpp"
#include "random.hpp"

namespace cfl {

enum class Algorithm { pcfl, acfl, trilateration };

inline std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::pcfl: return "pcfl";
        case Algorithm::acfl: return "acfl";
        default: return "trilateration";
    }
}

struct ExperimentConfig {
    Region region{1000.0, 1000.0, 20.0};
    double comm_range = 100.0;
    std::optional<double> d_anchor = 4.0;
    std::optional<std::size_t> anchor_count;  // overrides d_anchor when set
    std::size_t mobile_count = 100;
    Algorithm algorithm = Algorithm::pcfl;
    LocalizationConfig localization;  // variant follows `algorithm`
    ProjectionColors projection_colors = ProjectionColors::inherit;
    std::size_t trials = 50;
    double speed = 0.1;            // m/s
    double staleness_delay = 1.0;  // s between measurement and scoring
    NoiseModel noise;
    std::uint64_t seed = 42;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct ErrorStats {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double max = std::numeric_limits<double>::quiet_NaN();
    double min = std::numeric_limits<double>::quiet_NaN();
    double stddev = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> per_trial;  // one entry per localized node per trial, in (trial, node) order
    std::size_t failure_count = 0;
};

/// Euclidean distance between true and estimated positions.
inline double localization_error(const Position3D& truth, const Position3D& estimate) {
    return euclidean_distance(truth, estimate);
}

/// Per-node error over T runs: the mean of the per-run errors.
inline double mean_error(std::span<const double> run_errors) {
    if (run_errors.empty()) throw std::invalid_argument("mean_error: no runs");
    return std::accumulate(run_errors.begin(), run_errors.end(), 0.0) / static_cast<double>(run_errors.size());
}

/// Mean, extrema and population standard deviation of the errors.
inline ErrorStats summarize(std::vector<double> errors, std::size_t failures) {
    ErrorStats s;
    s.failure_count = failures;
    s.per_trial = std::move(errors);
    if (s.per_trial.empty()) return s;
    const auto n = static_cast<double>(s.per_trial.size());
    s.mean = std::accumulate(s.per_trial.begin(), s.per_trial.end(), 0.0) / n;
    const auto [lo, hi] = std::minmax_element(s.per_trial.begin(), s.per_trial.end());
    s.min = *lo;
    s.max = *hi;
    double sq = 0.0;
    for (double e : s.per_trial) sq += (e - s.mean) * (e - s.mean);
    s.stddev = std::sqrt(sq / n);
    return s;
}

inline void validate(const ExperimentConfig& c) {
    auto bad = [](const std::string& what) { return ConfigInvalid("invalid configuration: " + what); };
    if (!(c.region.x_extent > 0.0 && c.region.y_extent > 0.0 && c.region.z_extent > 0.0))
        throw bad("region extents must be > 0");
    if (!(c.comm_range > 0.0)) throw bad("comm_range must be > 0");
    if (c.anchor_count) {
        if (*c.anchor_count == 0) throw bad("anchor_count must be >= 1");
    } else if (!c.d_anchor || !(*c.d_anchor > 0.0)) {
        throw bad("d_anchor must be > 0");
    }
    if (c.mobile_count == 0) throw bad("mobile_count must be >= 1");
    if (c.localization.sample_count == 0) throw bad("sample_count must be >= 1");
    if (!(c.localization.threshold >= 0.0)) throw bad("threshold must be >= 0");
    if (c.trials == 0) throw bad("trials must be >= 1");
    if (!(c.speed >= 0.0)) throw bad("speed must be >= 0");
    if (!(c.staleness_delay >= 0.0)) throw bad("staleness_delay must be >= 0");
    if (!(c.noise.aoa_sigma >= 0.0)) throw bad("aoa_sigma must be >= 0");
    if (!(c.noise.depth_sigma >= 0.0)) throw bad("depth_sigma must be >= 0");
}

inline std::size_t resolved_anchor_count(const ExperimentConfig& c) {
    return c.anchor_count ? *c.anchor_count : anchors_from_density(*c.d_anchor, c.comm_range, c.region);
}

/// Linear least-squares position from the circle equations of the projected
/// distances. Used only as a sanity baseline.
inline Estimate baseline_trilateration(const LocalizationInput& input) {
    validate_input(input);
    std::vector<PlanarPoint> centers;
    std::vector<double> radii;
    std::size_t degenerate = 0;
    for (const auto& obs : input.observations) {
        if (is_degenerate_angle(obs.aoa)) {
            ++degenerate;
            continue;
        }
        centers.push_back(planar(obs.anchor_position));
        radii.push_back(projected_distance(obs.depth_difference, obs.aoa));
    }
    if (centers.size() < kMinimumAnchors) throw InsufficientAnchors{centers.size()};

    // Subtracting the mean circle equation linearizes the system around the
    // centroid of the projections.
    const auto n = static_cast<double>(centers.size());
    double cx = 0.0, cy = 0.0, c2 = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
        cx += centers[j].x / n;
        cy += centers[j].y / n;
    }
    for (std::size_t j = 0; j < centers.size(); ++j) {
        const double ux = centers[j].x - cx, uy = centers[j].y - cy;
        c2 += (ux * ux + uy * uy - radii[j] * radii[j]) / n;
    }
    // Rows: 2 (u_j - mean u) . q = |u_j|^2 - r_j^2 - mean(|u|^2 - r^2), with q relative to the centroid.
    double a11 = 0.0, a12 = 0.0, a22 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
        const double ux = centers[j].x - cx, uy = centers[j].y - cy;
        const double rhs = ux * ux + uy * uy - radii[j] * radii[j] - c2;
        const double rx = 2.0 * ux, ry = 2.0 * uy;
        a11 += rx * rx;
        a12 += rx * ry;
        a22 += ry * ry;
        b1 += rx * rhs;
        b2 += ry * rhs;
    }
    const double det = a11 * a22 - a12 * a12;
    const double scale = a11 + a22;
    if (!(scale > 0.0) || det <= 1e-10 * scale * scale) throw SingularGeometry{};

    Estimate est;
    est.position.x = cx + (a22 * b1 - a12 * b2) / det;
    est.position.y = cy + (a11 * b2 - a12 * b1) / det;
    est.position.z = input.mobile_depth;
    est.filtered_count = centers.size();
    est.degenerate_anchor_count = degenerate;
    return est;
}

/// Errors of one trial: one entry per mobile node, empty when the node could
/// not be localized.
inline std::vector<std::optional<double>> run_trial(const ExperimentConfig& config, std::size_t trial) {
    const auto t = static_cast<std::uint64_t>(trial);
    const Scenario scenario = deploy(config.region, resolved_anchor_count(config), config.mobile_count,
                                     config.comm_range, derive_seed(config.seed, {tag(StreamTag::deploy), t}),
                                     config.projection_colors);

    // Measurements are taken at time 0; the node keeps drifting for the
    // staleness delay before its estimate is scored.
    Scenario later = scenario;
    if (config.staleness_delay > 0.0) {
        Rng mobility = make_rng(config.seed, {tag(StreamTag::mobility), t});
        later = step_mobility(scenario, config.staleness_delay, config.speed, mobility);
    }

    LocalizationConfig loc = config.localization;
    loc.variant = config.algorithm == Algorithm::acfl ? Variant::acfl : Variant::pcfl;

    std::vector<std::optional<double>> errors;
    errors.reserve(scenario.mobiles.size());
    for (std::size_t i = 0; i < scenario.mobiles.size(); ++i) {
        const auto& m = scenario.mobiles[i];
        try {
            const auto input = observe(scenario, m.id, config.noise);
            Estimate est;
            if (config.algorithm == Algorithm::trilateration) {
                est = baseline_trilateration(input);
            } else {
                Rng rng = make_rng(config.seed, {tag(StreamTag::localize), t, static_cast<std::uint64_t>(m.id)});
                est = localize(input, loc, rng);
            }
            errors.emplace_back(localization_error(later.mobiles[i].position, est.position));
        } catch (const InsufficientAnchors&) {
            errors.emplace_back();
        } catch (const NoUsableAnchor&) {
            errors.emplace_back();
        } catch (const EmptyIntersection&) {
            errors.emplace_back();
        } catch (const SingularGeometry&) {
            errors.emplace_back();
        }
    }
    return errors;
}

/// T independent trials; parallel and serial execution give identical stats.
inline ErrorStats run_trials(const ExperimentConfig& config) {
    validate(config);
    std::vector<std::vector<std::optional<double>>> per_trial(config.trials);

    unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, config.trials));
    if (workers <= 1) {
        for (std::size_t t = 0; t < config.trials; ++t) per_trial[t] = run_trial(config, t);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t t = next++; t < config.trials; t = next++) {
                    try {
                        per_trial[t] = run_trial(config, t);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<double> errors;
    std::size_t failures = 0;
    for (const auto& trial : per_trial)
        for (const auto& e : trial) {
            if (e)
                errors.push_back(*e);
            else
                ++failures;
        }
    return summarize(std::move(errors), failures);
}

struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
};

/// Sets one numeric experiment parameter by name.
inline void apply_parameter(ExperimentConfig& c, const std::string& name, double value) {
    auto count = [&](const char* what) {
        if (!(value >= 0.0) || value != std::floor(value))
            throw ConfigInvalid(std::string(what) + " must be a nonnegative integer");
        return static_cast<std::size_t>(value);
    };
    if (name == "threshold") c.localization.threshold = value;
    else if (name == "sample_count") c.localization.sample_count = count("sample_count");
    else if (name == "d_anchor") { c.d_anchor = value; c.anchor_count.reset(); }
    else if (name == "anchor_count") c.anchor_count = count("anchor_count");
    else if (name == "mobile_count") c.mobile_count = count("mobile_count");
    else if (name == "speed") c.speed = value;
    else if (name == "staleness_delay") c.staleness_delay = value;
    else if (name == "comm_range") c.comm_range = value;
    else if (name == "trials") c.trials = count("trials");
    else if (name == "aoa_sigma") c.noise.aoa_sigma = value;
    else if (name == "depth_sigma") c.noise.depth_sigma = value;
    else if (name == "region_x") c.region.x_extent = value;
    else if (name == "region_y") c.region.y_extent = value;
    else if (name == "region_z") c.region.z_extent = value;
    else throw ConfigInvalid("unknown sweep parameter '" + name + "'");
}

struct ResultRow {
    std::string sweep_name = "none";
    std::optional<double> sweep_value;
    Algorithm algorithm = Algorithm::pcfl;
    std::optional<WeightingMode> weighting;  // empty for trilateration
    ErrorStats stats;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

inline ResultRow make_row(const ExperimentConfig& c, const ErrorStats& stats, const std::string& sweep_name = "none",
                          std::optional<double> sweep_value = std::nullopt) {
    ResultRow row{sweep_name, sweep_value, c.algorithm, std::nullopt, stats, c.trials, c.seed};
    if (c.algorithm != Algorithm::trilateration) row.weighting = c.localization.weighting;
    return row;
}

/// run_trials once per sweep value, everything else held fixed.
inline std::vector<ResultRow> run_sweep(const ExperimentConfig& config, const SweepSpec& sweep) {
    if (sweep.values.empty()) throw ConfigInvalid("sweep has no values");
    std::vector<ResultRow> rows;
    for (double v : sweep.values) {
        ExperimentConfig c = config;
        apply_parameter(c, sweep.parameter, v);
        rows.push_back(make_row(c, run_trials(c), sweep.parameter, v));
    }
    return rows;
}

/// Every (sweep value, algorithm, weighting mode) combination, one row each.
/// Trilateration ignores the weighting mode and gets a single row.
inline std::vector<ResultRow> run_plan(const ExperimentConfig& config, const std::vector<Algorithm>& algorithms,
                                       const std::vector<WeightingMode>& modes,
                                       const std::optional<SweepSpec>& sweep = std::nullopt) {
    if (algorithms.empty() || modes.empty()) throw ConfigInvalid("no algorithm or weighting mode selected");
    std::vector<double> values = sweep ? sweep->values : std::vector<double>{0.0};
    if (values.empty()) throw ConfigInvalid("sweep has no values");

    std::vector<ResultRow> rows;
    for (double v : values) {
        ExperimentConfig base = config;
        if (sweep) apply_parameter(base, sweep->parameter, v);
        for (auto algorithm : algorithms) {
            for (std::size_t i = 0; i < modes.size(); ++i) {
                if (algorithm == Algorithm::trilateration && i > 0) break;
                ExperimentConfig c = base;
                c.algorithm = algorithm;
                c.localization.weighting = modes[i];
                auto stats = run_trials(c);
                rows.push_back(sweep ? make_row(c, stats, sweep->parameter, v) : make_row(c, stats));
            }
        }
    }
    return rows;
}

// CSV -----------------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "sweep_name,sweep_value,algorithm,weighting_mode,mean_m,max_m,min_m,stddev_m,failures,trials,seed";

namespace detail {

inline std::string format_g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace detail

inline void write_csv(std::ostream& out, std::span<const ResultRow> rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.sweep_name << ',' << (r.sweep_value ? detail::format_g6(*r.sweep_value) : "") << ','
            << to_string(r.algorithm) << ',' << (r.weighting ? to_string(*r.weighting) : "none") << ','
            << detail::format_g6(r.stats.mean) << ',' << detail::format_g6(r.stats.max) << ','
            << detail::format_g6(r.stats.min) << ',' << detail::format_g6(r.stats.stddev) << ','
            << r.stats.failure_count << ',' << r.trials << ',' << r.seed << '\n';
    }
}

inline void emit_csv(std::span<const ResultRow> rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open '" + path + "' for writing");
    write_csv(out, rows);
    out.flush();
    if (!out) throw IoFailure("failed writing '" + path + "'");
}

/// Parses CSV written by write_csv. per_trial is not stored in the file and
/// comes back empty.
inline std::vector<ResultRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw IoFailure("CSV header mismatch");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (line.back() == ',') f.emplace_back();
        if (f.size() != 11) throw IoFailure("CSV row has " + std::to_string(f.size()) + " fields");

        ResultRow r;
        r.sweep_name = f[0];
        if (!f[1].empty()) r.sweep_value = std::stod(f[1]);
        if (f[2] == "pcfl") r.algorithm = Algorithm::pcfl;
        else if (f[2] == "acfl") r.algorithm = Algorithm::acfl;
        else if (f[2] == "trilateration") r.algorithm = Algorithm::trilateration;
        else throw IoFailure("unknown algorithm '" + f[2] + "'");
        if (f[3] == "literal") r.weighting = WeightingMode::literal;
        else if (f[3] == "inverse") r.weighting = WeightingMode::inverse;
        r.stats.mean = std::stod(f[4]);
        r.stats.max = std::stod(f[5]);
        r.stats.min = std::stod(f[6]);
        r.stats.stddev = std::stod(f[7]);
        r.stats.failure_count = std::stoull(f[8]);
        r.trials = std::stoull(f[9]);
        r.seed = std::stoull(f[10]);
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Human-readable table of result rows.
inline std::string format_summary(std::span<const ResultRow> rows) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-16s %10s %-14s %-8s %9s %9s %9s %9s %9s %8s\n", "sweep", "value", "algorithm",
                  "weights", "mean_m", "max_m", "min_m", "std_m", "located", "failed");
    out << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-16s %10s %-14s %-8s %9.4f %9.4f %9.4f %9.4f %9zu %8zu\n",
                      r.sweep_name.c_str(), r.sweep_value ? detail::format_g6(*r.sweep_value).c_str() : "-",
                      std::string(to_string(r.algorithm)).c_str(),
                      r.weighting ? std::string(to_string(*r.weighting)).c_str() : "-", r.stats.mean, r.stats.max,
                      r.stats.min, r.stats.stddev, r.stats.per_trial.size(), r.stats.failure_count);
        out << buf;
    }
    return out.str();
}

}  // namespace cfl
