#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "locsec/error.hpp"
#include "locsec/rng.hpp"

namespace locsec {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance_sq(const Point2& a, const Point2& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// Bearing of `to` as seen from `from`, in (-pi, pi].
inline double bearing(const Point2& from, const Point2& to) {
    return std::atan2(to.y - from.y, to.x - from.x);
}

/// One LOS eavesdropper link of a target: signal for `anchor` overheard at `candidate`.
struct EavLink {
    int anchor = 0;
    int candidate = 0;
    double lambda = 0.0;

    friend bool operator==(const EavLink&, const EavLink&) = default;
};

/// One LOS target-to-anchor link with its jamming-free Fisher intensity.
struct JamLink {
    int anchor = 0;
    double lambda = 0.0;

    friend bool operator==(const JamLink&, const JamLink&) = default;
};

struct AnchorConnectivity {
    std::vector<int> los;
    std::vector<int> nlos;

    friend bool operator==(const AnchorConnectivity&, const AnchorConnectivity&) = default;
};

/// Network description shared by the eavesdropper and jammer problems.
///
/// Per-target link lists are sparse: `eav_links[i]` is the LOS set N_L^(i)
/// together with its intensities, `jam_links[i]` the LOS anchor set with the
/// unjammed intensities. `jam_channel_gain[k][j]` is the power gain from
/// candidate k to anchor j. Jammer fields may be left empty for
/// eavesdropper-only scenarios.
struct Scenario {
    std::vector<Point2> targets;
    std::vector<double> prior;
    std::vector<Point2> anchors;
    std::vector<Point2> candidates;
    std::vector<AnchorConnectivity> anchor_connectivity;
    std::vector<std::vector<EavLink>> eav_links;
    std::vector<std::vector<JamLink>> jam_links;
    std::vector<std::vector<double>> jam_channel_gain;
    std::vector<double> jam_powers;
    std::vector<double> jam_noise;
    double power_budget = std::numeric_limits<double>::infinity();

    int target_count() const { return static_cast<int>(targets.size()); }
    int anchor_count() const { return static_cast<int>(anchors.size()); }
    int candidate_count() const { return static_cast<int>(candidates.size()); }

    bool has_jam_data() const {
        return !jam_powers.empty() && !jam_noise.empty() && !jam_channel_gain.empty() &&
               !jam_links.empty();
    }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

inline std::string indexed(const std::string& base, std::size_t i) {
    return base + "[" + std::to_string(i) + "]";
}

inline void require_finite_nonneg(double v, const std::string& field) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError(field, "must be finite and nonnegative");
}

}  // namespace detail

/// Checks the eavesdropper-side invariants (shapes, prior, intensities).
inline void validate_eav(const Scenario& s) {
    const auto nt = s.targets.size();
    const int na = s.anchor_count();
    const int n = s.candidate_count();
    if (nt == 0) throw ValidationError("targets", "at least one target required");
    if (s.candidates.empty()) throw ValidationError("candidates", "at least one candidate required");
    if (s.prior.size() != nt)
        throw ValidationError("prior", "length " + std::to_string(s.prior.size()) +
                                           " does not match target count " + std::to_string(nt));
    double total = 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
        detail::require_finite_nonneg(s.prior[i], detail::indexed("prior", i));
        total += s.prior[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ValidationError("prior", "entries sum to " + std::to_string(total) + ", expected 1");

    if (s.eav_links.size() != nt)
        throw ValidationError("eav_los", "one link list per target required");
    for (std::size_t i = 0; i < nt; ++i) {
        std::set<std::pair<int, int>> seen;
        for (std::size_t e = 0; e < s.eav_links[i].size(); ++e) {
            const auto& link = s.eav_links[i][e];
            const auto field = detail::indexed(detail::indexed("eav_intensity", i), e);
            if (link.anchor < 0 || link.anchor >= na)
                throw ValidationError(field, "anchor index out of range");
            if (link.candidate < 0 || link.candidate >= n)
                throw ValidationError(field, "candidate index out of range");
            detail::require_finite_nonneg(link.lambda, field);
            if (!seen.emplace(link.anchor, link.candidate).second)
                throw ValidationError(field, "duplicate (anchor, candidate) pair");
        }
    }
}

/// Checks the jammer-side invariants. Throws if jammer data is missing.
inline void validate_jam(const Scenario& s) {
    const auto nt = s.targets.size();
    const auto na = s.anchors.size();
    const auto n = s.candidates.size();
    if (s.jam_powers.empty()) throw ValidationError("jam_powers", "required for jammer selection");
    if (s.jam_noise.empty()) throw ValidationError("jam_noise", "required for jammer selection");
    if (s.jam_channel_gain.empty())
        throw ValidationError("jam_channel_gain", "required for jammer selection");
    if (s.jam_links.size() != nt)
        throw ValidationError("jam_anchor_intensity", "one link list per target required");
    if (s.jam_powers.size() != n) throw ValidationError("jam_powers", "length must equal candidate count");
    if (s.jam_noise.size() != na) throw ValidationError("jam_noise", "length must equal anchor count");
    if (s.jam_channel_gain.size() != n)
        throw ValidationError("jam_channel_gain", "one row per candidate required");
    for (std::size_t k = 0; k < n; ++k) {
        const auto row = detail::indexed("jam_channel_gain", k);
        if (s.jam_channel_gain[k].size() != na) throw ValidationError(row, "one entry per anchor required");
        for (std::size_t j = 0; j < na; ++j)
            detail::require_finite_nonneg(s.jam_channel_gain[k][j], detail::indexed(row, j));
        detail::require_finite_nonneg(s.jam_powers[k], detail::indexed("jam_powers", k));
    }
    for (std::size_t j = 0; j < na; ++j) {
        const auto field = detail::indexed("jam_noise", j);
        if (!std::isfinite(s.jam_noise[j]) || s.jam_noise[j] <= 0.0)
            throw ValidationError(field, "must be finite and strictly positive");
    }
    if (std::isnan(s.power_budget) || s.power_budget < 0.0)
        throw ValidationError("power_budget", "must be nonnegative");
    for (std::size_t i = 0; i < nt; ++i) {
        std::set<int> seen;
        for (std::size_t e = 0; e < s.jam_links[i].size(); ++e) {
            const auto& link = s.jam_links[i][e];
            const auto field = detail::indexed(detail::indexed("jam_anchor_intensity", i), e);
            if (link.anchor < 0 || link.anchor >= static_cast<int>(na))
                throw ValidationError(field, "anchor index out of range");
            detail::require_finite_nonneg(link.lambda, field);
            if (!seen.insert(link.anchor).second) throw ValidationError(field, "duplicate anchor");
        }
    }
    if (!s.anchor_connectivity.empty()) {
        if (s.anchor_connectivity.size() != nt)
            throw ValidationError("anchor_connectivity", "one entry per target required");
        for (std::size_t i = 0; i < nt; ++i) {
            const auto& conn = s.anchor_connectivity[i];
            for (const auto& link : s.jam_links[i]) {
                if (link.lambda > 0.0 &&
                    std::find(conn.los.begin(), conn.los.end(), link.anchor) == conn.los.end())
                    throw ValidationError(detail::indexed("anchor_connectivity", i),
                                          "anchor " + std::to_string(link.anchor) +
                                              " has intensity but is not in the LOS set");
            }
        }
    }
}

/// Full validation: eavesdropper side always, jammer side when present.
inline void validate(const Scenario& s) {
    validate_eav(s);
    if (!s.jam_powers.empty() || !s.jam_noise.empty() || !s.jam_channel_gain.empty() ||
        !s.jam_links.empty())
        validate_jam(s);
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Candidate region: the square [-outer, outer]^2 with the open rectangle
/// (-inner_x, inner_x) x (-inner_y, inner_y) removed.
struct CandidateRegion {
    double outer = 50.0;
    double inner_x = 20.0;
    double inner_y = 30.0;

    bool contains(const Point2& p) const {
        return std::abs(p.x) <= outer && std::abs(p.y) <= outer &&
               (std::abs(p.x) >= inner_x || std::abs(p.y) >= inner_y);
    }
};

struct GeneratorParams {
    int grid_half_extent = 5;
    double grid_step = 2.0;
    int anchor_count = 10;
    double anchor_radius = 18.0;
    int candidate_count = 100;
    double eav_noise = 0.1;   // sigma^2 in lambda = 1 / (d^2 sigma^2)
    double jam_noise = 0.1;   // sigma~^2, same for every anchor
    double jam_power = 10.0;  // P_k^J, same for every candidate
    double power_budget = -1.0;  // negative: jam_power * candidate_count
    CandidateRegion region;
};

/// 121 targets / 10 anchors / 100 candidates.
inline GeneratorParams paper_preset() { return {}; }

/// 49 targets / 6 anchors / 40 candidates.
inline GeneratorParams desk_preset() {
    GeneratorParams p;
    p.grid_half_extent = 3;
    p.anchor_count = 6;
    p.candidate_count = 40;
    return p;
}

/// Deterministic network on the square target grid {[m, n] * grid_step},
/// anchors evenly spaced on a circle, candidates drawn uniformly from the
/// region by rejection from its bounding box. All links LOS, all anchors
/// connected, uniform prior.
inline Scenario generate_scenario(const GeneratorParams& p, std::uint64_t seed) {
    if (p.grid_half_extent < 0) throw DomainError("grid_half_extent must be >= 0");
    if (p.anchor_count < 1) throw DomainError("anchor_count must be >= 1");
    if (p.candidate_count < 1) throw DomainError("candidate_count must be >= 1");
    if (!(p.eav_noise > 0.0) || !(p.jam_noise > 0.0)) throw DomainError("noise levels must be > 0");

    Scenario s;
    const int h = p.grid_half_extent;
    for (int m = -h; m <= h; ++m)
        for (int n = -h; n <= h; ++n) s.targets.push_back({m * p.grid_step, n * p.grid_step});
    s.prior.assign(s.targets.size(), 1.0 / static_cast<double>(s.targets.size()));

    for (int j = 0; j < p.anchor_count; ++j) {
        const double psi = 2.0 * std::numbers::pi * j / p.anchor_count;
        s.anchors.push_back({p.anchor_radius * std::cos(psi), p.anchor_radius * std::sin(psi)});
    }

    Rng rng(seed);
    const double outer = p.region.outer;
    while (s.candidate_count() < p.candidate_count) {
        const Point2 c{rng.uniform(-outer, outer), rng.uniform(-outer, outer)};
        if (p.region.contains(c)) s.candidates.push_back(c);
    }

    const auto nt = s.targets.size();
    const auto na = s.anchors.size();
    const auto n = s.candidates.size();
    for (std::size_t i = 0; i < nt; ++i) {
        for (std::size_t k = 0; k < n; ++k)
            if (distance_sq(s.targets[i], s.candidates[k]) == 0.0)
                throw DomainError("target " + std::to_string(i) + " coincides with candidate " +
                                  std::to_string(k));
        for (std::size_t j = 0; j < na; ++j)
            if (distance_sq(s.targets[i], s.anchors[j]) == 0.0)
                throw DomainError("target " + std::to_string(i) + " coincides with anchor " +
                                  std::to_string(j));
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < na; ++j)
            if (distance_sq(s.candidates[k], s.anchors[j]) == 0.0)
                throw DomainError("candidate " + std::to_string(k) + " coincides with anchor " +
                                  std::to_string(j));

    s.eav_links.resize(nt);
    s.jam_links.resize(nt);
    s.anchor_connectivity.resize(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        for (std::size_t j = 0; j < na; ++j) {
            s.anchor_connectivity[i].los.push_back(static_cast<int>(j));
            s.jam_links[i].push_back({static_cast<int>(j), 1.0 / distance_sq(s.targets[i], s.anchors[j])});
            for (std::size_t k = 0; k < n; ++k) {
                const double lambda = 1.0 / (distance_sq(s.targets[i], s.candidates[k]) * p.eav_noise);
                s.eav_links[i].push_back({static_cast<int>(j), static_cast<int>(k), lambda});
            }
        }
    }
    s.jam_channel_gain.assign(n, std::vector<double>(na));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < na; ++j)
            s.jam_channel_gain[k][j] = 1.0 / distance_sq(s.candidates[k], s.anchors[j]);
    s.jam_powers.assign(n, p.jam_power);
    s.jam_noise.assign(na, p.jam_noise);
    s.power_budget = p.power_budget < 0.0 ? p.jam_power * static_cast<double>(n) : p.power_budget;
    return s;
}

inline Scenario generate_paper_scenario(int grid_half_extent, double grid_step, int anchor_count,
                                        double anchor_radius, int candidate_count, std::uint64_t seed) {
    GeneratorParams p;
    p.grid_half_extent = grid_half_extent;
    p.grid_step = grid_step;
    p.anchor_count = anchor_count;
    p.anchor_radius = anchor_radius;
    p.candidate_count = candidate_count;
    return generate_scenario(p, seed);
}

/// Multiplies every eavesdropper and anchor intensity by exp(N(eav_mean, eav_var))
/// and every jammer channel gain by exp(N(gain_mean, gain_var)), one independent
/// draw per link. Draw order: eav links (target, list order), anchor links
/// (target, list order), gains (candidate, anchor).
inline Scenario apply_shadowing(const Scenario& s, std::uint64_t seed, double eav_mean, double eav_var,
                                double gain_mean, double gain_var) {
    if (eav_var < 0.0 || gain_var < 0.0) throw DomainError("shadowing variances must be >= 0");
    Scenario out = s;
    Rng rng(seed);
    for (auto& links : out.eav_links)
        for (auto& link : links) link.lambda *= std::exp(rng.normal(eav_mean, eav_var));
    for (auto& links : out.jam_links)
        for (auto& link : links) link.lambda *= std::exp(rng.normal(eav_mean, eav_var));
    for (auto& row : out.jam_channel_gain)
        for (auto& g : row) g *= std::exp(rng.normal(gain_mean, gain_var));
    return out;
}

/// Shadowing parameters used in the reference experiments.
struct ShadowingParams {
    double eav_mean = -2.0;
    double eav_var = 1.0;
    double gain_mean = -2.0;
    double gain_var = 2.0;
};

inline Scenario apply_shadowing(const Scenario& s, std::uint64_t seed, const ShadowingParams& p = {}) {
    return apply_shadowing(s, seed, p.eav_mean, p.eav_var, p.gain_mean, p.gain_var);
}

/// Normalized weights proportional to exp(-|x_i - center|^2 / (2 nu^2)).
inline std::vector<double> gaussian_like_prior(const std::vector<Point2>& targets, const Point2& center,
                                               double nu) {
    if (!(nu > 0.0)) throw DomainError("nu must be > 0");
    if (targets.empty()) return {};
    std::vector<double> log_w(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i)
        log_w[i] = -distance_sq(targets[i], center) / (2.0 * nu * nu);
    const double peak = *std::max_element(log_w.begin(), log_w.end());
    std::vector<double> w(targets.size());
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) total += w[i] = std::exp(log_w[i] - peak);
    for (auto& v : w) v /= total;
    return w;
}

/// Replaces each anchor position by a draw from the square of half-width r
/// around it. Anchor intensities scale by |x - y|^2 / |x - y~|^2 and gains by
/// |p - y|^2 / |p - y~|^2, which recomputes the inverse-square model exactly
/// and keeps any shadowing factors already applied.
inline Scenario perturb_anchor_knowledge(const Scenario& s, double r, std::uint64_t seed) {
    if (!(r >= 0.0)) throw DomainError("perturbation radius must be >= 0");
    Scenario out = s;
    Rng rng(seed);
    for (auto& a : out.anchors) {
        a.x += r * (2.0 * rng.uniform() - 1.0);
        a.y += r * (2.0 * rng.uniform() - 1.0);
    }
    for (std::size_t i = 0; i < out.jam_links.size(); ++i) {
        for (auto& link : out.jam_links[i]) {
            const auto j = static_cast<std::size_t>(link.anchor);
            link.lambda *= distance_sq(s.targets[i], s.anchors[j]) / distance_sq(s.targets[i], out.anchors[j]);
        }
    }
    for (std::size_t k = 0; k < out.jam_channel_gain.size(); ++k) {
        for (std::size_t j = 0; j < out.jam_channel_gain[k].size(); ++j) {
            out.jam_channel_gain[k][j] *=
                distance_sq(s.candidates[k], s.anchors[j]) / distance_sq(s.candidates[k], out.anchors[j]);
        }
    }
    return out;
}

/// Returns a copy with every eavesdropper intensity multiplied by `factor`.
inline Scenario scale_eav_intensities(const Scenario& s, double factor) {
    Scenario out = s;
    for (auto& links : out.eav_links)
        for (auto& link : links) link.lambda *= factor;
    return out;
}

}  // namespace locsec
