#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "locsec/eav_metrics.hpp"
#include "support.hpp"

using namespace locsec;
using locsec::fixtures::random_scenario;
using locsec::fixtures::random_vector;
using locsec::fixtures::symmetric_three;

TEST(AngleFactor, Values) {
    EXPECT_EQ(pairwise_angle_factor(0.7, 0.7), 0.0);
    EXPECT_NEAR(pairwise_angle_factor(0.0, std::numbers::pi), 1.0, 1e-15);
    EXPECT_NEAR(pairwise_angle_factor(0.0, 2.0 * std::numbers::pi / 3.0), 0.75, 1e-15);
}

TEST(SignalIntensity, Values) {
    EXPECT_EQ(lambda_from_signal(1e18, 5.0, 1.0), 0.0);
    EXPECT_EQ(lambda_from_signal(1e18, 0.0, 0.2), 0.0);
    const double beta_sq = kSpeedOfLight * kSpeedOfLight / (8.0 * std::numbers::pi);
    EXPECT_NEAR(lambda_from_signal(beta_sq, 1.0, 0.0), 1.0, 1e-12);
    EXPECT_THROW(lambda_from_signal(1.0, 1.0, 1.5), DomainError);
    EXPECT_THROW(lambda_from_signal(1.0, 1.0, -0.1), DomainError);
}

TEST(SignalSnr, Values) {
    EXPECT_EQ(snr_from_channel(0.0, 1.0, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(snr_from_channel(1.0, 2.0, 1.0), 1.0);
    const double sigma_sq = 0.3;
    EXPECT_NEAR(snr_from_channel(1.0 / 100.0, 2.0 * sigma_sq, sigma_sq), 0.01, 1e-15);
    EXPECT_THROW(snr_from_channel(1.0, 1.0, 0.0), DomainError);
}

TEST(ClosedForm, SymmetricThree) {
    const auto s = symmetric_three();
    const std::vector<double> z{1, 1, 1};
    const auto t = EavModel(s).closed_form_terms(0, z);
    EXPECT_NEAR(t.numerator, 13.5, 1e-12);
    EXPECT_NEAR(t.denominator, 10.125, 1e-12);
    EXPECT_NEAR(eav_crlb_closed_form(s, 0, z), 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(eav_fim_oracle(s, 0, z).trace, 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(eav_crlb_closed_form(symmetric_three(4.0), 0, z), 1.0 / 3.0, 1e-12);
}

TEST(ClosedForm, TwoOrFewerSelectedIsSingular) {
    const auto s = symmetric_three();
    for (const std::vector<double>& z : {std::vector<double>{1, 1, 0}, {0, 1, 0}, {0, 0, 0}}) {
        EXPECT_TRUE(std::isinf(eav_crlb_closed_form(s, 0, z)));
        EXPECT_TRUE(std::isinf(eav_fim_oracle(s, 0, z).trace));
    }
}

TEST(ClosedForm, MatchesOracleOnRandomInstances) {
    Rng rng(101);
    int finite = 0;
    for (int rep = 0; rep < 300; ++rep) {
        fixtures::RandomSpec spec;
        spec.candidates = 3 + static_cast<int>(rng.below(10));
        spec.targets = 1;
        spec.anchors = 2;
        spec.los_probability = 0.7;
        spec.jam = false;
        const auto s = random_scenario(rng, spec);
        auto z = random_vector(rng, static_cast<std::size_t>(spec.candidates));
        if (rep % 2 == 0)
            for (auto& v : z) v = v < 0.6 ? 1.0 : 0.0;
        const double closed = eav_crlb_closed_form(s, 0, z);
        const double oracle = eav_fim_oracle(s, 0, z).trace;
        ASSERT_EQ(std::isinf(closed), std::isinf(oracle)) << rep;
        const double fim = EavModel(s).objective_fim(z);
        ASSERT_EQ(std::isinf(closed), std::isinf(fim)) << rep;
        if (std::isfinite(closed)) {
            ++finite;
            EXPECT_LE(std::abs(closed - oracle) / oracle, 1e-9) << rep;
            EXPECT_LE(std::abs(closed - fim) / fim, 1e-9) << rep;
        }
    }
    EXPECT_GT(finite, 200);
}

TEST(ClosedForm, ObjectiveIsPriorWeighted) {
    Rng rng(5);
    fixtures::RandomSpec spec;
    spec.targets = 2;
    auto s = random_scenario(rng, spec);
    const auto z = random_vector(rng, 8, 0.2, 1.0);
    s.prior = {0.0, 1.0};
    EXPECT_NEAR(eav_objective(s, z), eav_crlb_closed_form(s, 1, z), 1e-12);
    // Two identical targets under a uniform prior give the single-target value.
    auto twin = s;
    twin.targets[0] = twin.targets[1];
    twin.eav_links[0] = twin.eav_links[1];
    twin.prior = {0.5, 0.5};
    EXPECT_NEAR(eav_objective(twin, z), eav_crlb_closed_form(s, 1, z), 1e-12);
}

TEST(ClosedForm, InfiniteTermMakesObjectiveInfinite) {
    auto s = symmetric_three();
    s.targets.push_back({1.0, 1.0});
    s.prior = {0.5, 0.5};
    s.eav_links.push_back({{0, 0, 1.0}});
    EXPECT_TRUE(std::isinf(eav_objective(s, std::vector<double>{1, 1, 1})));
    s.prior = {1.0, 0.0};
    EXPECT_NEAR(eav_objective(s, std::vector<double>{1, 1, 1}), 4.0 / 3.0, 1e-12);
}

TEST(Identity, BearingFormIsEightThirdsPairForm) {
    Rng rng(17);
    for (int rep = 0; rep < 200; ++rep) {
        const auto n = 3 + rng.below(8);
        const auto phi = random_vector(rng, n, -std::numbers::pi, std::numbers::pi);
        const auto a = random_vector(rng, n, 0.01, 3.0);
        const double q = bearing_triple_sum(phi, a);
        const double p = pairwise_triple_sum(phi, a);
        EXPECT_LE(std::abs(q - 8.0 / 3.0 * p), 1e-9 * std::abs(q)) << rep;
    }
}

TEST(Gradient, MatchesFiniteDifferences) {
    Rng rng(23);
    for (int rep = 0; rep < 40; ++rep) {
        const auto s = random_scenario(rng);
        const EavModel m(s);
        const auto z = random_vector(rng, 8, 0.2, 0.8);
        const auto g = m.gradient(z);
        EXPECT_LE(fixtures::gradient_error(g, z, [&](const auto& x) { return m.objective(x); }), 1e-5) << rep;
        EXPECT_LE(fixtures::gradient_error(g, z, [&](const auto& x) { return m.objective_fim(x); }), 1e-5) << rep;
        for (double v : g) EXPECT_LE(v, 0.0);
    }
}

TEST(Gradient, SymmetricPartialsEqual) {
    const auto g = eav_objective_gradient(symmetric_three(), std::vector<double>{1, 1, 1});
    EXPECT_NEAR(g[0], g[1], 1e-12);
    EXPECT_NEAR(g[1], g[2], 1e-12);
}

TEST(Gradient, SingularPointThrows) {
    EXPECT_THROW(eav_objective_gradient(symmetric_three(), std::vector<double>{1, 1, 0}), EvaluationError);
}

TEST(Properties, MonotoneAndConvex) {
    Rng rng(31);
    for (int rep = 0; rep < 500; ++rep) {
        const auto s = random_scenario(rng);
        const EavModel m(s);
        const auto w = random_vector(rng, 8);
        auto z = w;
        for (auto& v : z) v = std::min(1.0, v + rng.uniform(0.0, 0.5));
        const double fw = m.objective(w), fz = m.objective(z);
        if (std::isfinite(fw)) {
            EXPECT_LE(fz, fw + 1e-12 * fw);
        }
        const auto u = random_vector(rng, 8);
        std::vector<double> mid(8);
        for (std::size_t k = 0; k < 8; ++k) mid[k] = 0.5 * (w[k] + u[k]);
        const double fu = m.objective(u), fm = m.objective(mid);
        if (std::isfinite(fw) && std::isfinite(fu)) {
            EXPECT_LE(fm, 0.5 * (fw + fu) * (1.0 + 1e-12));
        }
    }
}

TEST(Properties, FullSelectionIsBest) {
    Rng rng(37);
    const auto s = random_scenario(rng);
    const EavModel m(s);
    const double all = m.objective(std::vector<double>(8, 1.0));
    for (int mask = 0; mask < 256; ++mask) {
        std::vector<double> z(8);
        for (int k = 0; k < 8; ++k) z[static_cast<std::size_t>(k)] = (mask >> k) & 1;
        EXPECT_LE(all, m.objective(z) + 1e-12);
    }
}

TEST(Properties, ScalingDividesObjective) {
    Rng rng(41);
    const auto s = random_scenario(rng);
    const auto z = random_vector(rng, 8, 0.3, 1.0);
    const double f = eav_objective(s, z);
    EXPECT_NEAR(eav_objective(scale_eav_intensities(s, 10.0), z), f / 10.0, 1e-12 * f);
}
