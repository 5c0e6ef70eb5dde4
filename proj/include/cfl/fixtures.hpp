#pragma once

// Canonical noise-free scenarios shared by the tests and the `fixtures` CLI
// subcommand.

#include "netsim.hpp"

namespace cfl::fixtures {

inline constexpr double kCanonicalRange = 100.0;

inline Scenario canonical_scenario(const Position3D& mobile) {
    Scenario s;
    s.region = {100.0, 100.0, 20.0};
    s.communication_range = kCanonicalRange;
    s.seed = 42;
    s.anchors = {
        {0, {0.0, 0.0, 0.0}, {0.8, 0.2, 0.4}, {0.8, 0.2, 0.4}},
        {1, {80.0, 0.0, 0.0}, {0.1, 0.9, 0.5}, {0.1, 0.9, 0.5}},
        {2, {0.0, 80.0, 0.0}, {0.3, 0.6, 0.9}, {0.3, 0.6, 0.9}},
    };
    s.mobiles = {{0, mobile, 0.0}};
    return s;
}

/// Three surface anchors, mobile node at (30, 30) and 10 m depth.
inline Scenario three_anchor() { return canonical_scenario({30.0, 30.0, 10.0}); }

/// Same anchors, mobile node directly below anchor 0 (on its projection).
inline Scenario under_anchor() { return canonical_scenario({0.0, 0.0, 10.0}); }

}  // namespace cfl::fixtures
