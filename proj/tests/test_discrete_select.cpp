#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "locsec/discrete_select.hpp"
#include "support.hpp"

using namespace locsec;
using locsec::fixtures::random_scenario;
using locsec::fixtures::random_vector;

namespace {

fixtures::RandomSpec small_spec(int n) {
    fixtures::RandomSpec spec;
    spec.candidates = n;
    spec.targets = 2;
    spec.anchors = 3;
    spec.los_probability = 0.85;
    return spec;
}

std::vector<double> weights(const SelectionVector& z) { return {z.weights().begin(), z.weights().end()}; }

int count(const SelectionVector& z) { return static_cast<int>(z.indices().size()); }

const SelectionOutcome& find(const std::vector<SelectionOutcome>& outs, const std::string& tag) {
    return *std::find_if(outs.begin(), outs.end(), [&](const auto& o) { return o.algorithm == tag; });
}

}  // namespace

TEST(RoundLargest, Examples) {
    EXPECT_EQ(weights(round_largest_m(std::vector<double>{0.7, 0.9, 0.2, 0.2}, 2)), (std::vector<double>{1, 1, 0, 0}));
    EXPECT_EQ(weights(round_largest_m(std::vector<double>{0.5, 0.5, 0.5}, 2)), (std::vector<double>{1, 1, 0}));
    EXPECT_EQ(weights(round_largest_m(std::vector<double>{0, 1, 1, 0}, 2)), (std::vector<double>{0, 1, 1, 0}));
    EXPECT_EQ(weights(round_largest_m(std::vector<double>{0.2, 0.4}, 0)), (std::vector<double>{0, 0}));
    EXPECT_THROW(round_largest_m(std::vector<double>{0.2, 0.4}, 3), DomainError);
}

TEST(Swap, EarlyExitWhenCloseToBound) {
    Rng rng(301);
    const auto s = random_scenario(rng, small_spec(8));
    const EavModel m(s);
    const auto p = SubsetProblem::eav(m);
    const auto z0 = SelectionVector::from_indices(8, std::vector<int>{0, 1, 2, 3});
    const double f0 = m.objective_fim(weights(z0));
    const auto out = swap_search(p, z0, f0 * 0.995, 0.01, 5);
    EXPECT_EQ(out.z, z0);
    EXPECT_EQ(out.swaps, 0);
    EXPECT_EQ(out.objective, f0);
    const auto none = swap_search(p, z0, 0.0, 0.01, 0);
    EXPECT_EQ(none.z, z0);
    EXPECT_EQ(none.swaps, 0);
}

TEST(Swap, NeverDegradesAndKeepsCount) {
    Rng rng(302);
    for (int rep = 0; rep < 100; ++rep) {
        const auto s = random_scenario(rng, small_spec(9));
        const EavModel eav(s);
        const JamModel jam(s);
        const int m = 3 + static_cast<int>(rng.below(3));
        const auto z0 = SelectionVector::from_indices(9, rng.sample_without_replacement(9, m));
        const auto pe = SubsetProblem::eav(eav);
        const auto oe = swap_search(pe, z0, 0.0, 0.01, 5);
        const double fe = eav.objective_fim(weights(z0));
        if (std::isfinite(fe)) {
            EXPECT_LE(oe.objective, fe);
        }
        EXPECT_EQ(count(oe.z), m);
        const auto pj = SubsetProblem::jam(jam, kInf);
        const auto oj = swap_search(pj, z0, kInf, 0.01, 5);
        EXPECT_GE(oj.objective, jam.objective(weights(z0)));
        EXPECT_EQ(count(oj.z), m);
        EXPECT_LE(oj.swaps, 5);
    }
}

TEST(Swap, FindsOptimumWhereRoundingFails) {
    // Search seeds for a jammer instance where largest-m rounding of the
    // relaxed solution misses the exhaustive optimum and swaps recover it.
    bool found = false;
    for (std::uint64_t seed = 1; seed < 400 && !found; ++seed) {
        Rng rng(seed);
        const auto s = random_scenario(rng, small_spec(8));
        const JamModel jam(s);
        const auto p = SubsetProblem::jam(jam, kInf);
        const auto relaxed = solve_relaxed_jam(s, 2);
        const auto start = round_largest_m(relaxed.z, 2);
        const auto ex = exhaustive_select(p, 2);
        if (jam.objective(weights(start)) >= ex.objective) continue;
        const auto out = swap_search(p, start, relaxed.objective, 0.0, 5);
        if (out.z != ex.z) continue;
        EXPECT_EQ(out.objective, ex.objective);
        EXPECT_GE(out.swaps, 1);
        found = true;
    }
    EXPECT_TRUE(found);
}

TEST(Swap, RejectsBadArguments) {
    const auto s = fixtures::symmetric_three();
    const EavModel m(s);
    const auto p = SubsetProblem::eav(m);
    const auto z0 = SelectionVector::from_indices(3, std::vector<int>{0, 1});
    EXPECT_THROW(swap_search(p, z0, 1.0, -0.1, 5), DomainError);
    EXPECT_THROW(swap_search(p, z0, 1.0, 0.01, -1), DomainError);
    EXPECT_THROW(swap_search(p, SelectionVector::relaxed({0.5, 0.5, 1.0}), 1.0, 0.01, 5), DomainError);
}

TEST(Exhaustive, SymmetricTiesGoToFirstSubset) {
    const double q = std::numbers::pi / 2.0;
    const auto s = fixtures::bearing_fixture({0.0, q, 2.0 * q, 3.0 * q}, {1.0, 1.0, 1.0, 1.0});
    const EavModel m(s);
    const auto out = exhaustive_select(SubsetProblem::eav(m), 3);
    EXPECT_EQ(weights(out.z), (std::vector<double>{1, 1, 1, 0}));
    EXPECT_NEAR(out.objective, 2.0, 1e-12);
    EXPECT_TRUE(out.feasible);
}

TEST(Exhaustive, PairsAreAllSingular) {
    Rng rng(303);
    const auto s = random_scenario(rng, small_spec(7));
    const EavModel m(s);
    const auto out = exhaustive_select(SubsetProblem::eav(m), 2);
    EXPECT_TRUE(std::isinf(out.objective));
    EXPECT_FALSE(out.feasible);
    EXPECT_EQ(count(out.z), 2);
}

TEST(Exhaustive, MatchesIndependentRecomputation) {
    Rng rng(304);
    for (int rep = 0; rep < 20; ++rep) {
        auto s = random_scenario(rng, small_spec(8));
        if (rep % 2 == 1) s.power_budget = 14.0;
        const EavModel eav(s);
        const JamModel jam(s);
        const int m = 3;
        double best_e = kInf, best_j = -kInf;
        for (int mask = 0; mask < 256; ++mask) {
            if (std::popcount(static_cast<unsigned>(mask)) != m) continue;
            std::vector<double> z(8);
            double used = 0.0;
            for (int k = 0; k < 8; ++k) {
                z[static_cast<std::size_t>(k)] = (mask >> k) & 1;
                used += z[static_cast<std::size_t>(k)] * s.jam_powers[static_cast<std::size_t>(k)];
            }
            best_e = std::min(best_e, eav_objective(s, z));
            if (used <= s.power_budget) best_j = std::max(best_j, jam_objective(s, z));
        }
        EXPECT_NEAR(exhaustive_select(SubsetProblem::eav(eav), m).objective, best_e, 1e-9 * best_e);
        if (std::isfinite(best_j)) {
            EXPECT_NEAR(exhaustive_select(SubsetProblem::jam(jam, s.power_budget), m).objective, best_j, 1e-12 * best_j);
        }
    }
}

TEST(Exhaustive, CapRefusesWithCount) {
    Rng rng(305);
    const auto s = random_scenario(rng, small_spec(12));
    const EavModel m(s);
    try {
        exhaustive_select(SubsetProblem::eav(m), 6, 100);
        FAIL() << "cap not enforced";
    } catch (const EnumerationCapError& e) {
        EXPECT_NE(std::string(e.what()).find("924"), std::string::npos);
    }
}

TEST(Robust, EffectiveIntensities) {
    auto s = fixtures::anchor_fixture({0.0, std::numbers::pi / 2.0}, {0.1});
    s.eav_links[0] = {{0, 0, 2.0}};
    const auto u = relative_uncertainty(s, {0.5}, {0.3});
    EXPECT_DOUBLE_EQ(robust_eav_effective(s, u).eav_links[0][0].lambda, 1.0);
    EXPECT_DOUBLE_EQ(robust_jam_effective(s, u).jam_links[0][0].lambda, 1.3);
    const auto zero = relative_uncertainty(s, {0.0}, {0.0});
    EXPECT_EQ(robust_eav_effective(s, zero).eav_links, s.eav_links);
    EXPECT_EQ(robust_jam_effective(s, zero).jam_links, s.jam_links);
    UncertaintyModel bad;
    bad.eav_delta = {{2.5}};
    EXPECT_THROW(robust_eav_effective(s, bad), ValidationError);
}

TEST(Robust, WorstCaseDirections) {
    Rng rng(306);
    for (int rep = 0; rep < 100; ++rep) {
        const auto s = random_scenario(rng, small_spec(8));
        const auto u = random_relative_uncertainty(s, 1000 + rep, 2000 + rep);
        const auto se = robust_eav_effective(s, u);
        const auto sj = robust_jam_effective(s, u);
        const auto z = random_vector(rng, 8);
        const double nominal = eav_objective(s, z);
        if (std::isfinite(nominal)) {
            EXPECT_GE(eav_objective(se, z), nominal);
        }
        EXPECT_LE(jam_objective(sj, z), jam_objective(s, z));
    }
}

TEST(Robust, CommutesWithScaling) {
    Rng rng(307);
    for (int rep = 0; rep < 10; ++rep) {
        const auto s = random_scenario(rng, small_spec(7));
        const auto u = random_relative_uncertainty(s, 10 + rep, 20 + rep);
        const auto base = robust_eav_effective(s, u);
        const auto scaled_s = scale_eav_intensities(s, 10.0);
        const auto scaled = robust_eav_effective(scaled_s, random_relative_uncertainty(scaled_s, 10 + rep, 20 + rep));
        const EavModel a(base), b(scaled);
        EXPECT_EQ(exhaustive_select(SubsetProblem::eav(a), 3).z, exhaustive_select(SubsetProblem::eav(b), 3).z);
    }
}

TEST(Joint, SwapRepairsAndStaysDisjoint) {
    Rng rng(308);
    int repaired = 0;
    for (int rep = 0; rep < 40; ++rep) {
        const auto s = random_scenario(rng, small_spec(8));
        const EavModel eav(s);
        const JamModel jam(s);
        JointProblem p{&eav, &jam, 4, 3, kInf, kInf};
        const auto best = exhaustive_select(SubsetProblem::eav(eav), 4);
        if (!best.feasible) continue;
        p.rho = best.objective * 1.5;
        const auto idx = rng.sample_without_replacement(8, 7);
        const auto zj = SelectionVector::from_indices(8, std::vector<int>(idx.begin(), idx.begin() + 3));
        const auto ze = SelectionVector::from_indices(8, std::vector<int>(idx.begin() + 3, idx.end()));
        const bool start_feasible = eav.objective_fim(weights(ze)) <= p.rho;
        const auto out = swap_search_joint(p, ze, zj, kInf, 0.01, 20);
        EXPECT_EQ(count(out.z), 3);
        EXPECT_EQ(count(out.z_eav), 4);
        for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(out.z[k] * out.z_eav[k], 0.0);
        EXPECT_EQ(out.feasible, out.eav_objective <= p.rho);
        if (start_feasible) {
            EXPECT_TRUE(out.feasible);
            EXPECT_GE(out.objective, jam.objective(weights(zj)));
        } else if (out.feasible) {
            ++repaired;
        }
    }
    EXPECT_GT(repaired, 0);
}

TEST(Joint, ExhaustiveMatchesBruteForce) {
    Rng rng(309);
    for (int rep = 0; rep < 10; ++rep) {
        const auto s = random_scenario(rng, small_spec(6));
        const EavModel eav(s);
        const JamModel jam(s);
        const auto eav_best = exhaustive_select(SubsetProblem::eav(eav), 3);
        if (!eav_best.feasible) continue;
        const double rho = eav_best.objective * 1.2;
        JointProblem p{&eav, &jam, 3, 2, rho, kInf};
        double best = -kInf;
        for (int jm = 0; jm < 64; ++jm) {
            if (std::popcount(static_cast<unsigned>(jm)) != 2) continue;
            for (int em = 0; em < 64; ++em) {
                if (std::popcount(static_cast<unsigned>(em)) != 3 || (em & jm)) continue;
                std::vector<double> ze(6), zj(6);
                for (int k = 0; k < 6; ++k) {
                    ze[static_cast<std::size_t>(k)] = (em >> k) & 1;
                    zj[static_cast<std::size_t>(k)] = (jm >> k) & 1;
                }
                if (eav_objective(s, ze) <= rho) best = std::max(best, jam_objective(s, zj));
            }
        }
        const auto out = exhaustive_select_joint(p);
        EXPECT_TRUE(out.feasible);
        EXPECT_NEAR(out.objective, best, 1e-12 * best);
    }
}

TEST(Pipeline, EavOrderingAndTags) {
    Rng rng(310);
    for (int rep = 0; rep < 10; ++rep) {
        const auto s = random_scenario(rng, small_spec(10));
        PipelineParams params;
        params.n_eav = 4;
        params.exhaustive = true;
        params.random_seeds = {7, 8};
        std::vector<SelectionOutcome> outs;
        try {
            outs = select_pipeline(s, params);
        } catch (const InformationInfeasibleError&) {
            continue;
        }
        ASSERT_EQ(outs.size(), 6u);
        const auto& bound = find(outs, "relaxed-bound");
        const auto& lm = find(outs, "largest-m");
        const auto& sw = find(outs, "swap");
        const auto& ex = find(outs, "exhaustive");
        EXPECT_LE(bound.objective, sw.objective + 1e-9);
        EXPECT_LE(sw.objective, lm.objective);
        EXPECT_LE(ex.objective, sw.objective * (1.0 + 1e-12));
        EXPECT_EQ(outs[4].algorithm, "swap-random");
        EXPECT_EQ(outs[4].seed, 7u);
        EXPECT_EQ(outs[5].seed, 8u);
        for (const auto& o : outs) {
            if (o.algorithm != "relaxed-bound") {
                EXPECT_EQ(count(o.z), 4);
            }
        }
    }
}

TEST(Pipeline, JointWithLooseRhoMatchesJamMode) {
    Rng rng(311);
    const auto s = random_scenario(rng, small_spec(8));
    PipelineParams jam;
    jam.mode = PipelineMode::jam;
    jam.n_jam = 3;
    PipelineParams joint = jam;
    joint.mode = PipelineMode::joint;
    joint.n_eav = 5;
    joint.rho = kInf;
    const auto a = select_pipeline(s, jam);
    const auto b = select_pipeline(s, joint);
    EXPECT_EQ(find(a, "largest-m").z, find(b, "largest-m").z);
    EXPECT_EQ(find(a, "swap").z, find(b, "swap").z);
    const auto& lm = find(b, "largest-m");
    for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(lm.z_eav[k], 1.0 - lm.z[k]);
}

TEST(Pipeline, StageTagInErrors) {
    Rng rng(312);
    const auto s = random_scenario(rng, small_spec(8));
    PipelineParams params;
    params.mode = PipelineMode::joint;
    params.n_eav = 5;
    params.n_jam = 3;
    params.rho = 1e-9;
    try {
        select_pipeline(s, params);
        FAIL() << "expected rho infeasibility";
    } catch (const RhoInfeasibleError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("relaxed: ", 0), 0u);
    }
}
