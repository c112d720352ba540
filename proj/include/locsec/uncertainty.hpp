#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "locsec/error.hpp"
#include "locsec/rng.hpp"
#include "locsec/scenario.hpp"

namespace locsec {

/// Bounded-error box around the nominal intensities.
///
/// `eav_delta[i][e]` bounds the error of `Scenario::eav_links[i][e]`,
/// `jam_delta[i][e]` that of `Scenario::jam_links[i][e]`. An empty outer
/// vector means "no uncertainty" on that side.
struct UncertaintyModel {
    std::vector<std::vector<double>> eav_delta;
    std::vector<std::vector<double>> jam_delta;

    friend bool operator==(const UncertaintyModel&, const UncertaintyModel&) = default;
};

inline void validate(const UncertaintyModel& u, const Scenario& s) {
    auto check_side = [](const auto& delta, const auto& links, const char* name, bool capped) {
        if (delta.empty()) return;
        if (delta.size() != links.size())
            throw ValidationError(name, "one entry list per target required");
        for (std::size_t i = 0; i < links.size(); ++i) {
            const auto row = detail::indexed(name, i);
            if (delta[i].size() != links[i].size())
                throw ValidationError(row, "must align with the scenario link list");
            for (std::size_t e = 0; e < links[i].size(); ++e) {
                const auto field = detail::indexed(row, e);
                detail::require_finite_nonneg(delta[i][e], field);
                if (capped && delta[i][e] > links[i][e].lambda)
                    throw ValidationError(field, "bound exceeds the nominal intensity");
            }
        }
    };
    check_side(u.eav_delta, s.eav_links, "eav_delta", true);
    check_side(u.jam_delta, s.jam_links, "jam_delta", false);
}

/// delta = eps_i * lambda-hat on the eavesdropper side and kappa_i * lambda~-hat
/// on the anchor side. Either vector may be empty to leave that side exact.
inline UncertaintyModel relative_uncertainty(const Scenario& s, const std::vector<double>& eps,
                                             const std::vector<double>& kappa) {
    UncertaintyModel u;
    const auto nt = s.targets.size();
    if (!eps.empty()) {
        if (eps.size() != nt) throw ValidationError("eav_epsilon", "one value per target required");
        if (s.eav_links.size() != nt) throw ValidationError("eav_epsilon", "scenario has no eavesdropper links");
        u.eav_delta.resize(nt);
        for (std::size_t i = 0; i < nt; ++i) {
            if (!(eps[i] >= 0.0 && eps[i] <= 1.0))
                throw ValidationError(detail::indexed("eav_epsilon", i), "must lie in [0, 1]");
            for (const auto& link : s.eav_links[i]) u.eav_delta[i].push_back(eps[i] * link.lambda);
        }
    }
    if (!kappa.empty()) {
        if (kappa.size() != nt) throw ValidationError("jam_kappa", "one value per target required");
        if (s.jam_links.size() != nt) throw ValidationError("jam_kappa", "scenario has no anchor links");
        u.jam_delta.resize(nt);
        for (std::size_t i = 0; i < nt; ++i) {
            if (!(kappa[i] >= 0.0))
                throw ValidationError(detail::indexed("jam_kappa", i), "must be nonnegative");
            for (const auto& link : s.jam_links[i]) u.jam_delta[i].push_back(kappa[i] * link.lambda);
        }
    }
    return u;
}

/// Per-target eps_i and kappa_i drawn i.i.d. uniform on [0, 1) from two seeds.
inline UncertaintyModel random_relative_uncertainty(const Scenario& s, std::uint64_t eps_seed,
                                                    std::uint64_t kappa_seed) {
    std::vector<double> eps(s.targets.size());
    std::vector<double> kappa(s.targets.size());
    Rng eps_rng(eps_seed);
    for (auto& e : eps) e = eps_rng.uniform();
    Rng kappa_rng(kappa_seed);
    for (auto& k : kappa) k = kappa_rng.uniform();
    return relative_uncertainty(s, eps, s.jam_links.empty() ? std::vector<double>{} : kappa);
}

}  // namespace locsec
