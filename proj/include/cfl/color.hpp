#pragma once

// RGB/HSV distance encoding. An anchor's color is darkened (HSV value) in
// proportion to distance, and a node's color is the inverse-distance weighted
// mix of the darkened anchor colors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace cfl {

/// Distances below this count as zero in the inverse-distance weights.
inline constexpr double kDistanceEpsilon = 1e-9;

struct RgbColor {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;

    friend bool operator==(const RgbColor&, const RgbColor&) = default;
};

/// h in degrees [0, 360); s and v in [0, 1].
struct HsvColor {
    double h = 0.0;
    double s = 0.0;
    double v = 0.0;

    friend bool operator==(const HsvColor&, const HsvColor&) = default;
};

/// Nonnegative weights summing to one, one per contributing anchor.
struct ProportionFactors {
    std::vector<double> weights;
};

/// Hexcone conversion. Achromatic colors (s == 0) get h = 0.
inline HsvColor rgb_to_hsv(const RgbColor& c) {
    const double max = std::max({c.r, c.g, c.b});
    const double min = std::min({c.r, c.g, c.b});
    const double delta = max - min;

    HsvColor out{0.0, 0.0, max};
    if (max <= 0.0 || delta <= 0.0) return out;
    out.s = delta / max;

    double h;
    if (c.r >= max)
        h = (c.g - c.b) / delta;
    else if (c.g >= max)
        h = 2.0 + (c.b - c.r) / delta;
    else
        h = 4.0 + (c.r - c.g) / delta;
    h *= 60.0;
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.h = h;
    return out;
}

inline RgbColor hsv_to_rgb(const HsvColor& c) {
    const double chroma = c.v * c.s;
    const double sector = c.h / 60.0;
    const double x = chroma * (1.0 - std::abs(std::fmod(sector, 2.0) - 1.0));
    const double m = c.v - chroma;

    RgbColor out;
    switch (static_cast<int>(sector) % 6) {
        case 0: out = {chroma, x, 0.0}; break;
        case 1: out = {x, chroma, 0.0}; break;
        case 2: out = {0.0, chroma, x}; break;
        case 3: out = {0.0, x, chroma}; break;
        case 4: out = {x, 0.0, chroma}; break;
        default: out = {chroma, 0.0, x}; break;
    }
    return {out.r + m, out.g + m, out.b + m};
}

/// Scales V by clamp(1 - d/range, 0, 1); H and S pass through.
inline HsvColor attenuate_value(const HsvColor& c, double d, double range) {
    if (!(range > 0.0)) throw std::invalid_argument("attenuate_value: range must be > 0");
    const double factor = std::clamp(1.0 - d / range, 0.0, 1.0);
    return {c.h, c.s, c.v * factor};
}

/// Normalized inverse-distance weights. Any distance under kDistanceEpsilon
/// takes the limit: those entries share the weight equally, the rest get 0.
inline ProportionFactors distance_weights(std::span<const double> distances) {
    if (distances.empty()) throw std::invalid_argument("distance_weights: empty distance list");

    ProportionFactors out;
    out.weights.assign(distances.size(), 0.0);

    const auto near_zero =
        std::count_if(distances.begin(), distances.end(), [](double d) { return d < kDistanceEpsilon; });
    if (near_zero > 0) {
        const double share = 1.0 / static_cast<double>(near_zero);
        for (std::size_t j = 0; j < distances.size(); ++j)
            if (distances[j] < kDistanceEpsilon) out.weights[j] = share;
        return out;
    }

    double total = 0.0;
    for (double d : distances) total += 1.0 / d;
    for (std::size_t j = 0; j < distances.size(); ++j) out.weights[j] = (1.0 / distances[j]) / total;
    return out;
}

/// Node color from per-anchor colors, distances and attenuation ranges.
inline RgbColor node_rgb(std::span<const RgbColor> anchor_colors, std::span<const double> distances,
                         std::span<const double> ranges) {
    if (anchor_colors.empty() || anchor_colors.size() != distances.size() || ranges.size() != distances.size())
        throw std::invalid_argument("node_rgb: mismatched or empty inputs");

    const auto lambda = distance_weights(distances);
    RgbColor out;
    for (std::size_t j = 0; j < anchor_colors.size(); ++j) {
        const auto faded = hsv_to_rgb(attenuate_value(rgb_to_hsv(anchor_colors[j]), distances[j], ranges[j]));
        const double w = lambda.weights[j];
        out.r += w * faded.r;
        out.g += w * faded.g;
        out.b += w * faded.b;
    }
    // Weights sum to 1 only up to rounding.
    return {std::clamp(out.r, 0.0, 1.0), std::clamp(out.g, 0.0, 1.0), std::clamp(out.b, 0.0, 1.0)};
}

inline RgbColor node_rgb(std::span<const RgbColor> anchor_colors, std::span<const double> distances, double range) {
    const std::vector<double> ranges(distances.size(), range);
    return node_rgb(anchor_colors, distances, ranges);
}

/// Euclidean distance in RGB space.
inline double nearness_degree(const RgbColor& a, const RgbColor& b) {
    const double dr = a.r - b.r;
    const double dg = a.g - b.g;
    const double db = a.b - b.b;
    return std::sqrt(dr * dr + dg * dg + db * db);
}

}  // namespace cfl
