#include <cmath>
#include <filesystem>
#include <numbers>

#include <gtest/gtest.h>

#include "locsec/scenario.hpp"
#include "locsec/scenario_io.hpp"
#include "locsec/uncertainty.hpp"
#include "support.hpp"

using namespace locsec;

TEST(Generator, PaperPresetCounts) {
    const auto s = generate_scenario(paper_preset(), 7);
    EXPECT_EQ(s.target_count(), 121);
    EXPECT_EQ(s.anchor_count(), 10);
    EXPECT_EQ(s.candidate_count(), 100);
    for (double w : s.prior) EXPECT_DOUBLE_EQ(w, 1.0 / 121.0);
    EXPECT_DOUBLE_EQ(s.power_budget, 1000.0);
    for (double p : s.jam_powers) EXPECT_EQ(p, 10.0);
}

TEST(Generator, AnchorsOnCircle) {
    const auto s = generate_paper_scenario(5, 2.0, 10, 18.0, 100, 1);
    for (int j = 0; j < 10; ++j) {
        const double psi = 2.0 * std::numbers::pi * j / 10.0;
        EXPECT_NEAR(s.anchors[static_cast<std::size_t>(j)].x, 18.0 * std::cos(psi), 1e-12);
        EXPECT_NEAR(s.anchors[static_cast<std::size_t>(j)].y, 18.0 * std::sin(psi), 1e-12);
    }
}

TEST(Generator, TargetGridAndRegion) {
    const auto s = generate_scenario(desk_preset(), 3);
    EXPECT_EQ(s.target_count(), 49);
    EXPECT_EQ(s.targets.front().x, -6.0);
    EXPECT_EQ(s.targets.back().y, 6.0);
    const CandidateRegion region;
    for (const auto& c : s.candidates) EXPECT_TRUE(region.contains(c));
}

TEST(Generator, InverseSquareIntensities) {
    const auto s = generate_scenario(desk_preset(), 5);
    const auto& link = s.eav_links[3][17];
    const auto d2 = distance_sq(s.targets[3], s.candidates[static_cast<std::size_t>(link.candidate)]);
    EXPECT_DOUBLE_EQ(link.lambda, 1.0 / (d2 * 0.1));
    EXPECT_DOUBLE_EQ(s.jam_links[2][1].lambda, 1.0 / distance_sq(s.targets[2], s.anchors[1]));
    EXPECT_DOUBLE_EQ(s.jam_channel_gain[4][2], 1.0 / distance_sq(s.candidates[4], s.anchors[2]));
    // sigma^2 = 0.1 at distance 10 gives lambda = 0.1.
    EXPECT_DOUBLE_EQ(1.0 / (100.0 * 0.1), 0.1);
}

TEST(Generator, DeterministicPerSeed) {
    EXPECT_EQ(generate_scenario(desk_preset(), 11), generate_scenario(desk_preset(), 11));
    EXPECT_NE(generate_scenario(desk_preset(), 11), generate_scenario(desk_preset(), 12));
}

TEST(Generator, RejectsCoincidentPositions) {
    GeneratorParams p = desk_preset();
    p.anchor_radius = 0.0;  // anchor 0 lands on the target at the origin
    try {
        generate_scenario(p, 1);
        FAIL() << "expected an error";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("anchor"), std::string::npos);
    }
}

TEST(Generator, RejectsBadCounts) {
    GeneratorParams p = desk_preset();
    p.anchor_count = 0;
    EXPECT_THROW(generate_scenario(p, 1), DomainError);
}

TEST(Shadowing, ZeroVarianceIsExpOfMean) {
    const auto s = generate_scenario(desk_preset(), 2);
    const auto t = apply_shadowing(s, 9, -2.0, 0.0, 1.0, 0.0);
    EXPECT_DOUBLE_EQ(t.eav_links[0][0].lambda, s.eav_links[0][0].lambda * std::exp(-2.0));
    EXPECT_DOUBLE_EQ(t.jam_links[1][1].lambda, s.jam_links[1][1].lambda * std::exp(-2.0));
    EXPECT_DOUBLE_EQ(t.jam_channel_gain[3][0], s.jam_channel_gain[3][0] * std::exp(1.0));
}

TEST(Shadowing, DeterministicAndKeepsZeros) {
    auto s = generate_scenario(desk_preset(), 2);
    s.eav_links[0][5].lambda = 0.0;
    const auto a = apply_shadowing(s, 4);
    EXPECT_EQ(a, apply_shadowing(s, 4));
    EXPECT_NE(a, apply_shadowing(s, 5));
    EXPECT_EQ(a.eav_links[0][5].lambda, 0.0);
    EXPECT_EQ(a.eav_links[0].size(), s.eav_links[0].size());
}

TEST(Shadowing, LogMomentsMatchParameters) {
    const auto s = generate_scenario(paper_preset(), 1);
    const auto t = apply_shadowing(s, 3);
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.eav_links.size(); ++i)
        for (std::size_t e = 0; e < s.eav_links[i].size(); ++e) {
            const double x = std::log(t.eav_links[i][e].lambda / s.eav_links[i][e].lambda);
            sum += x;
            sq += x * x;
            ++n;
        }
    const double mean = sum / n;
    EXPECT_NEAR(mean, -2.0, 0.01);
    EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.02);
}

TEST(Prior, FlatLimit) {
    const auto s = generate_scenario(paper_preset(), 1);
    const auto w = gaussian_like_prior(s.targets, {0.0, 0.0}, 1e6);
    for (double v : w) EXPECT_LT(std::abs(v - 1.0 / 121.0), 1e-6);
}

TEST(Prior, SingleTargetAndRatio) {
    EXPECT_EQ(gaussian_like_prior({{3.0, 4.0}}, {0.0, 0.0}, 0.01), std::vector<double>{1.0});
    const double nu = 2.5, d = 3.0;
    const auto w = gaussian_like_prior({{0.0, 0.0}, {d, 0.0}}, {0.0, 0.0}, nu);
    EXPECT_NEAR(w[0] / w[1], std::exp(d * d / (2.0 * nu * nu)), 1e-12);
}

TEST(Prior, SumsToOneAndRejectsNonPositive) {
    const auto s = generate_scenario(paper_preset(), 1);
    for (double nu : {1e-3, 0.1, 1.0, 10.0, 1e3}) {
        double total = 0.0;
        for (double v : gaussian_like_prior(s.targets, {0.0, 0.0}, nu)) total += v;
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
    EXPECT_THROW(gaussian_like_prior(s.targets, {0.0, 0.0}, 0.0), DomainError);
}

TEST(AnchorPerturbation, ZeroRadiusIsIdentity) {
    const auto s = apply_shadowing(generate_scenario(desk_preset(), 2), 2);
    EXPECT_EQ(perturb_anchor_knowledge(s, 0.0, 8), s);
}

TEST(AnchorPerturbation, StaysInSquareAndRecomputes) {
    const auto s = generate_scenario(desk_preset(), 2);
    const auto t = perturb_anchor_knowledge(s, 1.0, 8);
    EXPECT_EQ(t, perturb_anchor_knowledge(s, 1.0, 8));
    for (std::size_t j = 0; j < s.anchors.size(); ++j) {
        EXPECT_LE(std::abs(t.anchors[j].x - s.anchors[j].x), 1.0);
        EXPECT_LE(std::abs(t.anchors[j].y - s.anchors[j].y), 1.0);
    }
    EXPECT_NEAR(t.jam_links[5][2].lambda, 1.0 / distance_sq(t.targets[5], t.anchors[2]), 1e-15);
    EXPECT_NEAR(t.jam_channel_gain[7][3], 1.0 / distance_sq(t.candidates[7], t.anchors[3]), 1e-15);
    // Original untouched.
    EXPECT_EQ(s, generate_scenario(desk_preset(), 2));
}

TEST(Validation, PriorMustSumToOne) {
    auto s = generate_scenario(desk_preset(), 1);
    for (auto& w : s.prior) w *= 0.9;
    try {
        validate(s);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "prior");
    }
}

TEST(Validation, NegativeAndNonFiniteValues) {
    auto s = generate_scenario(desk_preset(), 1);
    s.eav_links[0][0].lambda = -1.0;
    EXPECT_THROW(validate(s), ValidationError);
    s = generate_scenario(desk_preset(), 1);
    s.jam_noise[0] = 0.0;
    EXPECT_THROW(validate(s), ValidationError);
    s = generate_scenario(desk_preset(), 1);
    s.jam_channel_gain[0][0] = std::nan("");
    EXPECT_THROW(validate(s), ValidationError);
}

class ScenarioFile : public ::testing::Test {
protected:
    std::filesystem::path path = std::filesystem::temp_directory_path() / "locsec_scenario_test.json";
    void TearDown() override { std::filesystem::remove(path); }
};

TEST_F(ScenarioFile, RoundTripIsExact) {
    const auto s = apply_shadowing(generate_scenario(paper_preset(), 7), 7);
    save_scenario(s, path);
    EXPECT_EQ(load_scenario(path), s);
}

TEST_F(ScenarioFile, RoundTripKeepsSparseLinksAndBudget) {
    Rng rng(3);
    fixtures::RandomSpec spec;
    spec.los_probability = 0.5;
    const auto s = fixtures::random_scenario(rng, spec);
    save_scenario(s, path);
    EXPECT_EQ(load_scenario(path), s);
    auto eav_only = s;
    eav_only.jam_links.clear();
    eav_only.jam_channel_gain.clear();
    eav_only.jam_powers.clear();
    eav_only.jam_noise.clear();
    save_scenario(eav_only, path);
    EXPECT_EQ(load_scenario(path), eav_only);
}

TEST(ScenarioJson, ErrorsNameTheField) {
    auto j = scenario_to_json(generate_scenario(desk_preset(), 1));
    j["prior"][0] = 0.5;
    try {
        scenario_from_json(j);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "prior");
    }
    j = scenario_to_json(generate_scenario(desk_preset(), 1));
    j.erase("targets");
    EXPECT_THROW(scenario_from_json(j), ValidationError);
    j = scenario_to_json(generate_scenario(desk_preset(), 1));
    j["candidates"][0] = "x";
    EXPECT_THROW(scenario_from_json(j), ValidationError);
}

TEST(ScenarioJson, MissingJamPowersRejectedForJamUse) {
    auto j = scenario_to_json(generate_scenario(desk_preset(), 1));
    j.erase("jam_powers");
    try {
        const auto s = scenario_from_json(j);
        validate_jam(s);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("jam_powers"), std::string::npos);
    }
}

TEST(ScenarioJson, IntensityOffLosIsRejected) {
    auto j = scenario_to_json(generate_scenario(desk_preset(), 1));
    j["eav_los"].erase(0);
    EXPECT_THROW(scenario_from_json(j), ValidationError);
}

TEST(Uncertainty, RelativeBoxes) {
    const auto s = generate_scenario(desk_preset(), 1);
    std::vector<double> eps(s.targets.size(), 0.5), kappa(s.targets.size(), 0.3);
    const auto u = relative_uncertainty(s, eps, kappa);
    EXPECT_DOUBLE_EQ(u.eav_delta[2][4], 0.5 * s.eav_links[2][4].lambda);
    EXPECT_DOUBLE_EQ(u.jam_delta[1][0], 0.3 * s.jam_links[1][0].lambda);
    eps[0] = 1.5;
    EXPECT_THROW(relative_uncertainty(s, eps, kappa), ValidationError);
}

TEST(Uncertainty, SeededDrawsAreDeterministic) {
    const auto s = generate_scenario(desk_preset(), 1);
    EXPECT_EQ(random_relative_uncertainty(s, 1, 2), random_relative_uncertainty(s, 1, 2));
    EXPECT_NE(random_relative_uncertainty(s, 1, 2), random_relative_uncertainty(s, 3, 2));
}

TEST(Uncertainty, DeltaAboveNominalIsRejected) {
    const auto s = generate_scenario(desk_preset(), 1);
    auto u = relative_uncertainty(s, std::vector<double>(s.targets.size(), 1.0), {});
    validate(u, s);
    u.eav_delta[0][0] *= 1.01;
    EXPECT_THROW(validate(u, s), ValidationError);
}

TEST(Uncertainty, JsonForms) {
    const auto s = generate_scenario(desk_preset(), 1);
    const auto a = uncertainty_from_json({{"eav_epsilon_seed", 1}, {"jam_kappa_seed", 2}}, s);
    EXPECT_EQ(a, random_relative_uncertainty(s, 1, 2));
    nlohmann::json eps = nlohmann::json::array();
    for (std::size_t i = 0; i < s.targets.size(); ++i) eps.push_back(0.25);
    const auto b = uncertainty_from_json({{"eav_epsilon", eps}}, s);
    EXPECT_DOUBLE_EQ(b.eav_delta[0][0], 0.25 * s.eav_links[0][0].lambda);
    EXPECT_TRUE(b.jam_delta.empty());
}
