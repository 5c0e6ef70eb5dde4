// Localizes the canonical three-anchor fixture with PCFL, ACFL and the
// trilateration baseline and prints the estimates.

#include <cstdio>

#include "cfl/cfl.hpp"
#include "cfl/fixtures.hpp"

int main() {
    const auto scenario = cfl::fixtures::three_anchor();
    const auto& truth = scenario.mobiles.front().position;
    const auto input = cfl::observe(scenario, 0, cfl::NoiseModel{});

    std::printf("true position      (%8.3f, %8.3f, %6.2f)\n", truth.x, truth.y, truth.z);
    for (auto variant : {cfl::Variant::pcfl, cfl::Variant::acfl}) {
        cfl::LocalizationConfig config;
        config.variant = variant;
        config.sample_count = 2000;
        cfl::Rng rng(7);
        const auto est = cfl::localize(input, config, rng);
        std::printf("%-18s (%8.3f, %8.3f, %6.2f)  error %.3f m, %zu samples kept%s\n",
                    std::string(cfl::to_string(variant)).c_str(), est.position.x, est.position.y, est.position.z,
                    cfl::localization_error(truth, est.position), est.filtered_count,
                    est.fallback_used ? " (fallback)" : "");
    }
    const auto lls = cfl::baseline_trilateration(input);
    std::printf("%-18s (%8.3f, %8.3f, %6.2f)  error %.3g m\n", "trilateration", lls.position.x, lls.position.y,
                lls.position.z, cfl::localization_error(truth, lls.position));
}
