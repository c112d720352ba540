#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "locsec/rng.hpp"
#include "locsec/scenario.hpp"

namespace locsec::fixtures {

/// One target at the origin, one anchor, candidates on a circle of radius 10
/// at the given bearings with the given per-candidate intensities.
inline Scenario bearing_fixture(const std::vector<double>& angles, const std::vector<double>& lambdas) {
    Scenario s;
    s.targets = {{0.0, 0.0}};
    s.prior = {1.0};
    s.anchors = {{30.0, 0.0}};
    s.eav_links.resize(1);
    for (std::size_t k = 0; k < angles.size(); ++k) {
        s.candidates.push_back({10.0 * std::cos(angles[k]), 10.0 * std::sin(angles[k])});
        s.eav_links[0].push_back({0, static_cast<int>(k), lambdas[k]});
    }
    return s;
}

/// Three candidates 120 degrees apart, unit intensities.
inline Scenario symmetric_three(double lambda = 1.0) {
    const double t = 2.0 * std::numbers::pi / 3.0;
    return bearing_fixture({0.0, t, 2.0 * t}, {lambda, lambda, lambda});
}

/// One target at the origin with LOS anchors at the given bearings, unit
/// intensities, unit noise, and jammer candidates with the given gains to
/// every anchor.
inline Scenario anchor_fixture(const std::vector<double>& bearings, const std::vector<double>& jammer_gain,
                               double power = 10.0) {
    Scenario s;
    s.targets = {{0.0, 0.0}};
    s.prior = {1.0};
    s.jam_links.resize(1);
    for (std::size_t j = 0; j < bearings.size(); ++j) {
        s.anchors.push_back({20.0 * std::cos(bearings[j]), 20.0 * std::sin(bearings[j])});
        s.jam_links[0].push_back({static_cast<int>(j), 1.0});
    }
    s.eav_links.resize(1);
    for (std::size_t k = 0; k < jammer_gain.size(); ++k) {
        s.candidates.push_back({-40.0 - 5.0 * static_cast<double>(k), 7.0});
        s.jam_channel_gain.push_back(std::vector<double>(bearings.size(), jammer_gain[k]));
        s.jam_powers.push_back(power);
    }
    s.jam_noise.assign(bearings.size(), 1.0);
    return s;
}

struct RandomSpec {
    int candidates = 8;
    int targets = 3;
    int anchors = 3;
    double los_probability = 0.8;
    bool jam = true;
    double budget = std::numeric_limits<double>::infinity();
};

/// Random network: positions uniform in a 100 m square, random sparse LOS
/// maps, log-uniform intensities and gains, random prior.
inline Scenario random_scenario(Rng& rng, const RandomSpec& spec = {}) {
    Scenario s;
    auto point = [&] { return Point2{rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0)}; };
    auto log_uniform = [&](double lo, double hi) { return std::exp(rng.uniform(std::log(lo), std::log(hi))); };
    for (int i = 0; i < spec.targets; ++i) s.targets.push_back(point());
    double total = 0.0;
    for (int i = 0; i < spec.targets; ++i) {
        s.prior.push_back(rng.uniform(0.1, 1.0));
        total += s.prior.back();
    }
    for (auto& w : s.prior) w /= total;
    for (int j = 0; j < spec.anchors; ++j) s.anchors.push_back(point());
    for (int k = 0; k < spec.candidates; ++k) s.candidates.push_back(point());
    s.eav_links.resize(static_cast<std::size_t>(spec.targets));
    for (int i = 0; i < spec.targets; ++i)
        for (int j = 0; j < spec.anchors; ++j)
            for (int k = 0; k < spec.candidates; ++k)
                if (rng.uniform() < spec.los_probability)
                    s.eav_links[static_cast<std::size_t>(i)].push_back({j, k, log_uniform(0.05, 5.0)});
    if (!spec.jam) return s;
    s.jam_links.resize(static_cast<std::size_t>(spec.targets));
    for (int i = 0; i < spec.targets; ++i)
        for (int j = 0; j < spec.anchors; ++j)
            s.jam_links[static_cast<std::size_t>(i)].push_back({j, log_uniform(0.1, 10.0)});
    s.jam_channel_gain.assign(static_cast<std::size_t>(spec.candidates),
                              std::vector<double>(static_cast<std::size_t>(spec.anchors)));
    for (auto& row : s.jam_channel_gain)
        for (auto& g : row) g = log_uniform(1e-3, 1.0);
    for (int k = 0; k < spec.candidates; ++k) s.jam_powers.push_back(rng.uniform(1.0, 10.0));
    for (int j = 0; j < spec.anchors; ++j) s.jam_noise.push_back(rng.uniform(0.05, 1.0));
    s.power_budget = spec.budget;
    return s;
}

/// Random vector with entries uniform on [lo, hi].
inline std::vector<double> random_vector(Rng& rng, std::size_t n, double lo = 0.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

/// Relative error ||g - fd|| / ||fd|| of an analytic gradient against
/// central differences with step h.
template <class F>
double gradient_error(std::span<const double> g, std::vector<double> z, F&& f, double h = 1e-6) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double keep = z[k];
        z[k] = keep + h;
        const double up = f(z);
        z[k] = keep - h;
        const double down = f(z);
        z[k] = keep;
        const double fd = (up - down) / (2.0 * h);
        num += (g[k] - fd) * (g[k] - fd);
        den += fd * fd;
    }
    return std::sqrt(num / den);
}

}  // namespace locsec::fixtures
