// Picks 8 eavesdropper positions on a shadowed desk-size network and prints
// what each stage of the pipeline achieves.

#include <cmath>
#include <cstdio>
#include <string>

#include "locsec/discrete_select.hpp"
#include "locsec/scenario.hpp"

int main() {
    using namespace locsec;
    const auto s = apply_shadowing(generate_scenario(desk_preset(), 7), 7);

    PipelineParams p;
    p.mode = PipelineMode::eav;
    p.n_eav = 8;
    p.random_seeds = {1, 2, 3};

    for (const auto& o : select_pipeline(s, p)) {
        auto label = o.algorithm;
        if (o.seed) label += " seed " + std::to_string(*o.seed);
        std::printf("%-22s %8.3f m  swaps %d\n", label.c_str(), std::sqrt(o.objective), o.swaps);
    }
}
