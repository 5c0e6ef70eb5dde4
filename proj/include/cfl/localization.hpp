#pragma once

// PCFL / ACFL estimators. One call localizes one mobile node at one instant:
//   (a) sample the intersection of the task rings,
//   (b) encode the node and every sample as an RGB color,
//   (c) keep samples whose color is near the node's and average them.
// The two variants differ only in the distance that drives the encoding:
// PCFL uses the in-plane distance to the anchor's projection, ACFL the slant
// distance to the anchor itself.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "color.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "random.hpp"

namespace cfl {

enum class Variant { pcfl, acfl };

/// How nearness degrees become estimate weights. `literal` weights a sample
/// by its nearness, `inverse` by the reciprocal of its nearness.
enum class WeightingMode { literal, inverse };

/// Attenuation range per anchor: the communication range R, or the in-plane
/// maximum sqrt(R^2 - k^2) of that anchor's ring.
enum class RangeMode { global_r, per_anchor };

inline constexpr std::size_t kMinimumAnchors = 3;

/// Nearness below this counts as an exact color match in inverse weighting.
inline constexpr double kExactMatchNearness = 1e-12;

struct AnchorObservation {
    int anchor_id = 0;
    Position3D anchor_position;
    double depth_difference = 0.0;  // k, meters
    double aoa = 0.0;               // alpha, radians in [0, pi/2]
    RgbColor anchor_color;
    RgbColor projection_color;      // color used by PCFL; equals anchor_color unless assigned independently
};

struct LocalizationInput {
    double mobile_depth = 0.0;
    std::vector<AnchorObservation> observations;
    double communication_range = 0.0;
};

struct LocalizationConfig {
    Variant variant = Variant::pcfl;
    std::size_t sample_count = 400;
    double threshold = 0.01;
    WeightingMode weighting = WeightingMode::literal;
    RangeMode range_mode = RangeMode::global_r;
};

struct WeightedSample {
    PlanarPoint point;
    RgbColor rgb;
    double nearness = 0.0;
    double normalized_weight = 0.0;
};

struct FilterResult {
    std::vector<WeightedSample> kept;
    bool fallback_used = false;
};

struct Estimate {
    Position3D position;
    std::size_t filtered_count = 0;
    bool fallback_used = false;
    std::size_t degenerate_anchor_count = 0;
};

inline std::string_view to_string(Variant v) { return v == Variant::pcfl ? "pcfl" : "acfl"; }
inline std::string_view to_string(WeightingMode m) { return m == WeightingMode::literal ? "literal" : "inverse"; }
inline std::string_view to_string(RangeMode m) { return m == RangeMode::global_r ? "global_R" : "per_anchor"; }

inline void validate_observation(const AnchorObservation& obs, double range) {
    if (!(obs.aoa >= 0.0 && obs.aoa <= std::numbers::pi / 2))
        throw std::invalid_argument("observation " + std::to_string(obs.anchor_id) + ": AOA outside [0, pi/2]");
    if (!(obs.depth_difference >= 0.0))
        throw std::invalid_argument("observation " + std::to_string(obs.anchor_id) + ": negative depth difference");
    if (obs.depth_difference > range) throw DepthExceedsRange{};
}

/// Builds a validated observation. PCFL projection color defaults to the
/// anchor's broadcast color.
inline AnchorObservation make_observation(int anchor_id, const Position3D& anchor_position, double k, double alpha,
                                          const RgbColor& color, double range,
                                          std::optional<RgbColor> projection_color = std::nullopt) {
    AnchorObservation obs{anchor_id, anchor_position, k, alpha, color, projection_color.value_or(color)};
    validate_observation(obs, range);
    return obs;
}

inline void validate_input(const LocalizationInput& input) {
    if (!(input.communication_range > 0.0)) throw std::invalid_argument("communication range must be > 0");
    for (const auto& obs : input.observations) validate_observation(obs, input.communication_range);
}

namespace detail {

// Per-anchor data for the color encoding, restricted to non-degenerate anchors.
struct Encoding {
    Variant variant;
    std::vector<PlanarPoint> centers;
    std::vector<double> depth_differences;
    std::vector<RgbColor> colors;
    std::vector<double> ranges;
    std::vector<double> node_distances;
    std::size_t degenerate = 0;

    static Encoding build(const LocalizationInput& input, const LocalizationConfig& config) {
        Encoding e{config.variant, {}, {}, {}, {}, {}, 0};
        const double R = input.communication_range;
        for (const auto& obs : input.observations) {
            if (is_degenerate_angle(obs.aoa)) {
                ++e.degenerate;
                continue;
            }
            const double k = obs.depth_difference;
            e.centers.push_back(planar(obs.anchor_position));
            e.depth_differences.push_back(k);
            e.colors.push_back(config.variant == Variant::pcfl ? obs.projection_color : obs.anchor_color);
            e.ranges.push_back(config.range_mode == RangeMode::global_r
                                   ? R
                                   : std::max(std::sqrt(R * R - k * k), kDistanceEpsilon));
            e.node_distances.push_back(config.variant == Variant::pcfl ? projected_distance(k, obs.aoa)
                                                                       : slant_distance(k, obs.aoa));
        }
        if (e.centers.empty()) throw NoUsableAnchor{};
        return e;
    }

    std::size_t usable() const { return centers.size(); }

    RgbColor node_color() const { return node_rgb(colors, node_distances, ranges); }

    RgbColor sample_color(const PlanarPoint& s, std::vector<double>& scratch) const {
        scratch.resize(centers.size());
        for (std::size_t j = 0; j < centers.size(); ++j) {
            const double in_plane = planar_distance(s, centers[j]);
            scratch[j] = variant == Variant::pcfl ? in_plane : std::hypot(in_plane, depth_differences[j]);
        }
        return node_rgb(colors, scratch, ranges);
    }
};

}  // namespace detail

/// Per-anchor distances that drive the node's color: projected distances for
/// PCFL, slant distances for ACFL. Degenerate-angle observations are skipped;
/// the result follows the order of the remaining observations.
inline std::vector<double> anchor_distances(const LocalizationInput& input, Variant variant) {
    std::vector<double> out;
    for (const auto& obs : input.observations) {
        if (is_degenerate_angle(obs.aoa)) continue;
        out.push_back(variant == Variant::pcfl ? projected_distance(obs.depth_difference, obs.aoa)
                                               : slant_distance(obs.depth_difference, obs.aoa));
    }
    if (out.empty()) throw NoUsableAnchor{};
    return out;
}

inline RgbColor mobile_rgb(const LocalizationInput& input, const LocalizationConfig& config) {
    return detail::Encoding::build(input, config).node_color();
}

/// Colors of candidate points in the mobile node's plane, computed from the
/// sample's own distances to each projection (PCFL) or anchor (ACFL).
inline std::vector<RgbColor> sample_rgbs(std::span<const PlanarPoint> samples, const LocalizationInput& input,
                                         const LocalizationConfig& config) {
    const auto encoding = detail::Encoding::build(input, config);
    std::vector<RgbColor> out;
    out.reserve(samples.size());
    std::vector<double> scratch;
    for (const auto& s : samples) out.push_back(encoding.sample_color(s, scratch));
    return out;
}

/// Keeps samples with nearness <= threshold. When nothing passes, keeps the
/// single closest sample (first one on ties) and sets fallback_used.
inline FilterResult filter_samples(std::span<const WeightedSample> weighted, double threshold) {
    FilterResult out;
    for (const auto& s : weighted)
        if (s.nearness <= threshold) out.kept.push_back(s);
    if (out.kept.empty() && !weighted.empty()) {
        const auto best = std::min_element(weighted.begin(), weighted.end(),
                                           [](const auto& a, const auto& b) { return a.nearness < b.nearness; });
        out.kept.push_back(*best);
        out.fallback_used = true;
    }
    return out;
}

/// Fills normalized_weight for every sample according to the weighting mode.
inline void normalize_weights(std::span<WeightedSample> samples, WeightingMode mode) {
    if (samples.empty()) throw EmptyFilteredSet{};
    const auto n = static_cast<double>(samples.size());

    if (mode == WeightingMode::inverse) {
        const auto exact = std::count_if(samples.begin(), samples.end(),
                                         [](const auto& s) { return s.nearness < kExactMatchNearness; });
        if (exact > 0) {
            for (auto& s : samples)
                s.normalized_weight = s.nearness < kExactMatchNearness ? 1.0 / static_cast<double>(exact) : 0.0;
            return;
        }
        double total = 0.0;
        for (const auto& s : samples) total += 1.0 / s.nearness;
        for (auto& s : samples) s.normalized_weight = (1.0 / s.nearness) / total;
        return;
    }

    double total = 0.0;
    for (const auto& s : samples) total += s.nearness;
    // All-zero nearness has no literal normalization; treat samples equally.
    if (total <= 0.0) {
        for (auto& s : samples) s.normalized_weight = 1.0 / n;
        return;
    }
    for (auto& s : samples) s.normalized_weight = s.nearness / total;
}

inline Estimate weighted_estimate(std::span<const WeightedSample> filtered, double mobile_depth, WeightingMode mode) {
    if (filtered.empty()) throw EmptyFilteredSet{};
    std::vector<WeightedSample> weighted(filtered.begin(), filtered.end());
    normalize_weights(weighted, mode);

    Estimate est;
    for (const auto& s : weighted) {
        est.position.x += s.normalized_weight * s.point.x;
        est.position.y += s.normalized_weight * s.point.y;
    }
    est.position.z = mobile_depth;
    est.filtered_count = weighted.size();
    return est;
}

/// Task rings of every observation, degenerate ones included (k ~ 0 gives a
/// radius-R ring that still constrains the node).
inline std::vector<TaskRing> task_rings(const LocalizationInput& input) {
    std::vector<TaskRing> rings;
    rings.reserve(input.observations.size());
    for (const auto& obs : input.observations)
        rings.push_back(make_task_ring(project_anchor(obs.anchor_position, input.mobile_depth),
                                       input.communication_range, obs.depth_difference));
    return rings;
}

/// Full three-step localization of one mobile node.
inline Estimate localize(const LocalizationInput& input, const LocalizationConfig& config, Rng& rng) {
    validate_input(input);
    if (config.sample_count == 0) throw std::invalid_argument("sample_count must be >= 1");
    if (!(config.threshold >= 0.0)) throw std::invalid_argument("threshold must be >= 0");

    const auto usable = static_cast<std::size_t>(std::count_if(
        input.observations.begin(), input.observations.end(), [](const auto& o) { return !is_degenerate_angle(o.aoa); }));
    if (usable < kMinimumAnchors) throw InsufficientAnchors{usable};

    const auto rings = task_rings(input);
    const auto points = sample_intersection(rings, config.sample_count, rng);

    const auto encoding = detail::Encoding::build(input, config);
    const RgbColor target = encoding.node_color();

    std::vector<WeightedSample> weighted;
    weighted.reserve(points.size());
    std::vector<double> scratch;
    for (const auto& p : points) {
        const RgbColor c = encoding.sample_color(p, scratch);
        weighted.push_back({p, c, nearness_degree(c, target), 0.0});
    }

    const auto filtered = filter_samples(weighted, config.threshold);
    Estimate est = weighted_estimate(filtered.kept, input.mobile_depth, config.weighting);
    est.fallback_used = filtered.fallback_used;
    est.degenerate_anchor_count = encoding.degenerate;
    return est;
}

}  // namespace cfl
