#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "cfl/fixtures.hpp"
#include "cfl/netsim.hpp"

namespace cfl {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Netsim, AnchorsFromDensity) {
    const Region region{1000, 1000, 20};
    // 4 * 2e7 / (4/3 pi 1e6) = 19.0986 and 0.5 * 2e7 / (4/3 pi 1e6) = 2.3873
    EXPECT_EQ(anchors_from_density(4.0, 100.0, region), 19u);
    EXPECT_EQ(anchors_from_density(0.5, 100.0, region), 2u);
    EXPECT_EQ(anchors_from_density(1e-6, 100.0, region), 1u);
    EXPECT_THROW(anchors_from_density(0.0, 100.0, region), std::invalid_argument);
}

TEST(Netsim, DeployIsDeterministicAndInRegion) {
    const Region region{1000, 1000, 20};
    const auto a = deploy(region, 19, 1, 100, 7);
    const auto b = deploy(region, 19, 1, 100, 7);
    ASSERT_EQ(a.anchors.size(), 19u);
    ASSERT_EQ(a.mobiles.size(), 1u);
    for (std::size_t i = 0; i < a.anchors.size(); ++i) {
        EXPECT_EQ(a.anchors[i].position, b.anchors[i].position);
        EXPECT_EQ(a.anchors[i].color, b.anchors[i].color);
        EXPECT_EQ(a.anchors[i].projection_color, a.anchors[i].color);
        EXPECT_TRUE(region.contains(a.anchors[i].position));
        for (double ch : {a.anchors[i].color.r, a.anchors[i].color.g, a.anchors[i].color.b}) {
            EXPECT_GE(ch, 0.0);
            EXPECT_LE(ch, 1.0);
        }
    }
    EXPECT_TRUE(region.contains(a.mobiles[0].position));

    const auto c = deploy(region, 19, 1, 100, 8);
    EXPECT_NE(a.anchors[0].position, c.anchors[0].position);
}

TEST(Netsim, IndependentProjectionColors) {
    const auto s = deploy({100, 100, 20}, 5, 1, 100, 3, ProjectionColors::independent);
    for (const auto& a : s.anchors) EXPECT_NE(a.projection_color, a.color);
}

TEST(Netsim, DiscoverTaskAnchorsBoundaryInclusive) {
    Scenario s;
    s.region = {500, 500, 200};
    s.communication_range = 100;
    s.mobiles = {{0, {0, 0, 0}, 0}};
    s.anchors = {{0, {60, 0, 80}, {}, {}}, {1, {100.001, 0, 0}, {}, {}}, {2, {0, 50, 0}, {}, {}}};
    EXPECT_EQ(discover_task_anchors(s, 0), (std::vector<int>{0, 2}));
    s.anchors = {{1, {100.001, 0, 0}, {}, {}}};
    EXPECT_TRUE(discover_task_anchors(s, 0).empty());
    EXPECT_THROW(discover_task_anchors(s, 9), std::out_of_range);
}

TEST(Netsim, SynthesizeObservation) {
    Rng rng(1);
    const AnchorNode vertical{0, {0, 0, 0}, {0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}};
    auto obs = synthesize_observation(vertical, {0, 0, 5}, 100, {}, rng);
    EXPECT_DOUBLE_EQ(obs.depth_difference, 5.0);
    EXPECT_DOUBLE_EQ(obs.aoa, kPi / 2);
    EXPECT_EQ(obs.anchor_color, vertical.color);

    const AnchorNode tilted{1, {3, 0, 4}, {}, {}};
    obs = synthesize_observation(tilted, {0, 0, 0}, 100, {}, rng);
    EXPECT_DOUBLE_EQ(obs.depth_difference, 4.0);
    EXPECT_NEAR(obs.aoa, 0.9272952180016122, 1e-12);

    const AnchorNode level{2, {30, 0, 7}, {}, {}};
    obs = synthesize_observation(level, {0, 0, 7}, 100, {}, rng);
    EXPECT_EQ(obs.depth_difference, 0.0);
    EXPECT_EQ(obs.aoa, 0.0);
}

TEST(Netsim, NoiseFreeMeasurementsReproduceGeometry) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto s = deploy({300, 300, 20}, 25, 4, 100, seed);
        for (const auto& m : s.mobiles) {
            const auto input = observe(s, m.id, {});
            for (const auto& obs : input.observations) {
                if (is_degenerate_angle(obs.aoa)) continue;
                const double d = euclidean_distance(obs.anchor_position, m.position);
                EXPECT_NEAR(slant_distance(obs.depth_difference, obs.aoa), d, 1e-9 * d);
                const double p = planar_distance(planar(obs.anchor_position), planar(m.position));
                EXPECT_NEAR(projected_distance(obs.depth_difference, obs.aoa), p, 1e-9 * d);
            }
        }
    }
}

TEST(Netsim, NoisyMeasurementsStayClamped) {
    const NoiseModel noise{0.5, 30.0};
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto s = deploy({200, 200, 20}, 20, 5, 100, seed);
        for (const auto& m : s.mobiles)
            for (const auto& obs : observe(s, m.id, noise).observations) {
                EXPECT_GE(obs.aoa, 0.0);
                EXPECT_LE(obs.aoa, kPi / 2);
                EXPECT_GE(obs.depth_difference, 0.0);
                EXPECT_LE(obs.depth_difference, 100.0);
            }
    }
}

TEST(Netsim, ObserveUsesPerNodeStreams) {
    const auto s = deploy({200, 200, 20}, 20, 5, 100, 4);
    const NoiseModel noise{0.01, 0.1};
    const auto a = observe(s, 2, noise);
    const auto b = observe(s, 2, noise);
    ASSERT_EQ(a.observations.size(), b.observations.size());
    for (std::size_t i = 0; i < a.observations.size(); ++i) EXPECT_EQ(a.observations[i].aoa, b.observations[i].aoa);
}

TEST(Netsim, MobilityExamples) {
    Scenario s;
    s.region = {1000, 1000, 20};
    s.mobiles = {{0, {500, 500, 10}, 0.0}, {1, {1000, 200, 5}, 0.0}};
    s.anchors = {{0, {1, 2, 3}, {}, {}}};
    Rng rng(3);

    const auto still = step_mobility(s, 1.0, 0.0, rng);
    EXPECT_EQ(still.mobiles[0].position, s.mobiles[0].position);

    const auto moved = step_mobility(s, 1.0, 10.0, rng);
    EXPECT_DOUBLE_EQ(moved.mobiles[0].position.x, 510.0);
    EXPECT_DOUBLE_EQ(moved.mobiles[0].position.y, 500.0);
    EXPECT_EQ(moved.mobiles[0].position.z, 10.0);
    EXPECT_EQ(moved.anchors[0].position, s.anchors[0].position);

    // At the +x wall heading +x: bounced back inside, now heading -x.
    EXPECT_DOUBLE_EQ(moved.mobiles[1].position.x, 990.0);
    EXPECT_LT(std::cos(moved.mobiles[1].heading), 0.0);
}

TEST(Netsim, MobilityStaysInRegion) {
    auto s = deploy({100, 50, 20}, 1, 20, 100, 11);
    Rng rng(12);
    for (int step = 0; step < 200; ++step) {
        s = step_mobility(s, 0.5 + step % 3, 7.0 * (step % 5), rng);
        for (const auto& m : s.mobiles) EXPECT_TRUE(s.region.contains(m.position));
    }
    // A jump several region widths long still lands inside.
    s = step_mobility(s, 1.0, 1234.5, rng);
    for (const auto& m : s.mobiles) EXPECT_TRUE(s.region.contains(m.position));
}

TEST(Netsim, ScenarioTextRoundTrip) {
    const auto original = deploy({300, 200, 20}, 6, 3, 100, 5, ProjectionColors::independent);
    std::stringstream text;
    write_scenario(text, original);
    const auto back = read_scenario(text);
    EXPECT_EQ(back.region.x_extent, original.region.x_extent);
    EXPECT_EQ(back.communication_range, original.communication_range);
    EXPECT_EQ(back.seed, original.seed);
    ASSERT_EQ(back.anchors.size(), original.anchors.size());
    ASSERT_EQ(back.mobiles.size(), original.mobiles.size());
    for (std::size_t i = 0; i < back.anchors.size(); ++i) {
        EXPECT_EQ(back.anchors[i].position, original.anchors[i].position);
        EXPECT_EQ(back.anchors[i].color, original.anchors[i].color);
        EXPECT_EQ(back.anchors[i].projection_color, original.anchors[i].projection_color);
    }
    for (std::size_t i = 0; i < back.mobiles.size(); ++i) {
        EXPECT_EQ(back.mobiles[i].position, original.mobiles[i].position);
        EXPECT_EQ(back.mobiles[i].heading, original.mobiles[i].heading);
    }
}

TEST(Netsim, ScenarioTextFormat) {
    std::stringstream text;
    write_scenario(text, fixtures::three_anchor());
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(text, line)) lines.push_back(line);
    ASSERT_EQ(lines.size(), 8u);
    EXPECT_EQ(lines[4], "anchor,0,0,0,0,0.80000000000000004,0.20000000000000001,0.40000000000000002");
    EXPECT_EQ(lines[7], "mobile,0,30,30,10,0,0,0,0");

    std::stringstream bad("anchor,1,2,3\n");
    EXPECT_THROW(read_scenario(bad), std::invalid_argument);
    std::stringstream bad_number("range,abc\n");
    EXPECT_THROW(read_scenario(bad_number), std::invalid_argument);
}

}  // namespace
}  // namespace cfl
