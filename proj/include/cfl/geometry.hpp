#pragma once

// Spatial primitives: node positions, AOA-derived distances, task rings in the
// mobile node's depth plane, and uniform sampling of a ring intersection.

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "errors.hpp"
#include "random.hpp"

namespace cfl {

/// Angles below this are treated as 0 (anchor at the node's depth).
inline constexpr double kAngleEpsilon = 1e-6;

/// Proposal budget per requested sample in sample_intersection.
inline constexpr std::size_t kProposalsPerSample = 10'000;

/// Node coordinates in meters; z is depth, increasing downward.
struct Position3D {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Position3D&, const Position3D&) = default;
};

/// A point in the mobile node's depth plane.
struct PlanarPoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
};

/// Closed disk in the plane z = plane_depth that must contain the mobile node.
struct TaskRing {
    PlanarPoint center;
    double radius = 0.0;
    double plane_depth = 0.0;
};

inline double euclidean_distance(const Position3D& a, const Position3D& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double planar_distance(const PlanarPoint& a, const PlanarPoint& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline PlanarPoint planar(const Position3D& p) { return {p.x, p.y}; }

inline bool is_degenerate_angle(double alpha) { return alpha < kAngleEpsilon; }

/// Anchor-to-node distance from depth difference k and elevation angle alpha.
inline double slant_distance(double k, double alpha) {
    if (is_degenerate_angle(alpha)) throw DegenerateAngle{};
    return k / std::sin(alpha);
}

/// In-plane distance from the node to the anchor's projection.
inline double projected_distance(double k, double alpha) {
    if (is_degenerate_angle(alpha)) throw DegenerateAngle{};
    return k / std::tan(alpha);
}

/// Projects an anchor onto the mobile node's depth plane.
inline Position3D project_anchor(const Position3D& anchor, double mobile_depth) {
    return {anchor.x, anchor.y, mobile_depth};
}

inline TaskRing make_task_ring(const Position3D& projection, double range, double k) {
    if (k > range) throw DepthExceedsRange{};
    return {{projection.x, projection.y}, std::sqrt(range * range - k * k), projection.z};
}

inline bool ring_contains(const TaskRing& ring, const PlanarPoint& p) {
    const double dx = p.x - ring.center.x;
    const double dy = p.y - ring.center.y;
    return dx * dx + dy * dy <= ring.radius * ring.radius;
}

inline bool all_rings_contain(std::span<const TaskRing> rings, const PlanarPoint& p) {
    for (const auto& ring : rings)
        if (!ring_contains(ring, p)) return false;
    return true;
}

/// Index of the smallest-radius ring; ties go to the earliest ring.
inline std::size_t smallest_ring_index(std::span<const TaskRing> rings) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < rings.size(); ++i)
        if (rings[i].radius < rings[best].radius) best = i;
    return best;
}

/// Draws m points uniformly from the intersection of the rings by rejection
/// sampling over the bounding square of the smallest ring.
///
/// At most kProposalsPerSample * m proposals are made. If the budget runs out
/// after at least one acceptance, the accepted points are repeated cyclically
/// up to m; with no acceptance EmptyIntersection is thrown.
inline std::vector<PlanarPoint> sample_intersection(std::span<const TaskRing> rings, std::size_t m, Rng& rng) {
    if (rings.empty()) throw std::invalid_argument("sample_intersection: no rings");
    if (m == 0) throw std::invalid_argument("sample_intersection: m must be >= 1");

    const TaskRing& box = rings[smallest_ring_index(rings)];
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    std::vector<PlanarPoint> points;
    points.reserve(m);
    const std::size_t budget = kProposalsPerSample * m;
    for (std::size_t proposals = 0; proposals < budget && points.size() < m; ++proposals) {
        const double u = unit(rng);
        const double v = unit(rng);
        const PlanarPoint p{box.center.x + u * box.radius, box.center.y + v * box.radius};
        if (all_rings_contain(rings, p)) points.push_back(p);
    }

    if (points.empty()) throw EmptyIntersection{};
    for (std::size_t i = 0; points.size() < m; ++i) points.push_back(points[i]);
    return points;
}

}  // namespace cfl
