#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "cfl/geometry.hpp"
#include "cfl/netsim.hpp"

namespace cfl {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Geometry, EuclideanDistance) {
    EXPECT_DOUBLE_EQ(euclidean_distance({0, 0, 0}, {3, 4, 12}), 13.0);
    EXPECT_DOUBLE_EQ(euclidean_distance({5, 5, 5}, {5, 5, 5}), 0.0);
    EXPECT_DOUBLE_EQ(euclidean_distance({1, 2, 3}, {4, 6, 3}), 5.0);
    EXPECT_DOUBLE_EQ(euclidean_distance({4, 6, 3}, {1, 2, 3}), 5.0);
}

TEST(Geometry, SlantDistance) {
    EXPECT_NEAR(slant_distance(5, kPi / 6), 10.0, 1e-12);
    EXPECT_NEAR(slant_distance(7, kPi / 2), 7.0, 1e-12);
    EXPECT_NEAR(slant_distance(4, std::asin(0.8)), 5.0, 1e-12);
}

TEST(Geometry, ProjectedDistance) {
    EXPECT_NEAR(projected_distance(5, kPi / 4), 5.0, 1e-12);
    EXPECT_NEAR(projected_distance(7, kPi / 2), 0.0, 1e-12);
    EXPECT_NEAR(projected_distance(3, kPi / 6), 3.0 * std::sqrt(3.0), 1e-12);
}

TEST(Geometry, DegenerateAngleRejected) {
    EXPECT_THROW(slant_distance(1.0, 0.0), DegenerateAngle);
    EXPECT_THROW(projected_distance(1.0, 5e-7), DegenerateAngle);
    EXPECT_NO_THROW(slant_distance(1.0, kAngleEpsilon));
}

TEST(Geometry, PythagoreanIdentityHolds) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> k(0.0, 100.0), alpha(kAngleEpsilon, kPi / 2);
    for (int i = 0; i < 10'000; ++i) {
        const double kk = k(rng), a = alpha(rng);
        const double p = projected_distance(kk, a), d = slant_distance(kk, a);
        const double lhs = p * p + kk * kk, rhs = d * d;
        EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(rhs, 1e-300)) << "k=" << kk << " alpha=" << a;
    }
}

TEST(Geometry, ProjectAnchor) {
    EXPECT_EQ(project_anchor({10, 20, 5}, 12), (Position3D{10, 20, 12}));
    EXPECT_EQ(project_anchor({3, 4, 9}, 9), (Position3D{3, 4, 9}));
    EXPECT_EQ(project_anchor({0, 0, 0}, 20), (Position3D{0, 0, 20}));
}

TEST(Geometry, TaskRingRadius) {
    EXPECT_DOUBLE_EQ(make_task_ring({1, 2, 3}, 100, 60).radius, 80.0);
    EXPECT_DOUBLE_EQ(make_task_ring({1, 2, 3}, 100, 0).radius, 100.0);
    EXPECT_DOUBLE_EQ(make_task_ring({1, 2, 3}, 100, 100).radius, 0.0);
    const auto ring = make_task_ring({1, 2, 3}, 100, 60);
    EXPECT_EQ(ring.center, (PlanarPoint{1, 2}));
    EXPECT_EQ(ring.plane_depth, 3.0);
    EXPECT_THROW(make_task_ring({0, 0, 0}, 100, 100.5), DepthExceedsRange);
}

TEST(Geometry, RingContainsIsClosed) {
    EXPECT_TRUE(ring_contains({{0, 0}, 10, 0}, {6, 8}));
    EXPECT_FALSE(ring_contains({{0, 0}, 10, 0}, {8, 8}));
    EXPECT_TRUE(ring_contains({{5, 5}, 0, 0}, {5, 5}));
}

TEST(Geometry, SampleSingleRing) {
    Rng rng(1);
    const std::vector<TaskRing> rings{{{0, 0}, 10, 0}};
    const auto pts = sample_intersection(rings, 100, rng);
    ASSERT_EQ(pts.size(), 100u);
    for (const auto& p : pts) EXPECT_LE(std::hypot(p.x, p.y), 10.0);
}

TEST(Geometry, SampleDisjointRingsThrows) {
    Rng rng(1);
    const std::vector<TaskRing> rings{{{0, 0}, 10, 0}, {{30, 0}, 10, 0}};
    EXPECT_THROW(sample_intersection(rings, 1, rng), EmptyIntersection);
    EXPECT_THROW(sample_intersection(rings, 5, rng), EmptyIntersection);
}

TEST(Geometry, SampleLensCentroid) {
    // Lens centroid (2.5, 0) confirmed by 0.01 m grid integration of the
    // region (numpy, independent of this code).
    Rng rng(2024);
    const std::vector<TaskRing> rings{{{0, 0}, 10, 0}, {{5, 0}, 10, 0}};
    const auto pts = sample_intersection(rings, 200, rng);
    ASSERT_EQ(pts.size(), 200u);
    double cx = 0, cy = 0;
    for (const auto& p : pts) {
        EXPECT_TRUE(ring_contains(rings[0], p));
        EXPECT_TRUE(ring_contains(rings[1], p));
        cx += p.x / 200;
        cy += p.y / 200;
    }
    EXPECT_LT(std::hypot(cx - 2.5, cy), 1.0);
}

TEST(Geometry, SampleDeterministicAndOrderInvariant) {
    const std::vector<TaskRing> a{{{0, 0}, 12, 0}, {{5, 3}, 9, 0}, {{-2, 4}, 15, 0}};
    const std::vector<TaskRing> b{a[2], a[1], a[0]};
    Rng r1(77), r2(77), r3(77);
    const auto p1 = sample_intersection(a, 50, r1);
    const auto p2 = sample_intersection(a, 50, r2);
    const auto p3 = sample_intersection(b, 50, r3);
    EXPECT_EQ(p1, p2);
    EXPECT_EQ(p1, p3);
}

TEST(Geometry, SampleCyclesWhenBudgetRunsOut) {
    // Zero-radius ring: every proposal is the center, which the other ring
    // contains, so all m points coincide.
    Rng rng(5);
    const std::vector<TaskRing> rings{{{3, 4}, 0, 0}, {{0, 0}, 10, 0}};
    const auto pts = sample_intersection(rings, 7, rng);
    ASSERT_EQ(pts.size(), 7u);
    for (const auto& p : pts) EXPECT_EQ(p, (PlanarPoint{3, 4}));
}

TEST(Geometry, SampledPointsSatisfyEveryRing) {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> c(-20, 20), r(15, 40);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<TaskRing> rings;
        const int n = 2 + trial % 4;
        for (int j = 0; j < n; ++j) rings.push_back({{c(gen) * 0.3, c(gen) * 0.3}, r(gen), 0});
        Rng rng(trial);
        std::vector<PlanarPoint> pts;
        try {
            pts = sample_intersection(rings, 64, rng);
        } catch (const EmptyIntersection&) {
            continue;
        }
        ASSERT_EQ(pts.size(), 64u);
        for (const auto& p : pts) EXPECT_TRUE(all_rings_contain(rings, p));
    }
}

// The true node position lies inside every task ring built from noise-free
// measurements of anchors within range.
TEST(Geometry, TrueNodeInsideEveryTaskRing) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto s = deploy({300, 300, 20}, 30, 5, 100, seed);
        for (const auto& m : s.mobiles) {
            const auto input = observe(s, m.id, {});
            for (const auto& obs : input.observations) {
                const auto ring = make_task_ring(project_anchor(obs.anchor_position, m.position.z),
                                                 s.communication_range, obs.depth_difference);
                EXPECT_TRUE(ring_contains(ring, planar(m.position)));
            }
        }
    }
}

}  // namespace
}  // namespace cfl
