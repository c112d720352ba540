#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "locsec/eav_metrics.hpp"
#include "locsec/error.hpp"
#include "locsec/scenario.hpp"

namespace locsec {

/// Anchor-side position EFIM of one target under jamming.
struct JamEfim2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
    std::vector<double> weights;  // g_ij, aligned with Scenario::jam_links[i]

    double trace() const { return xx + yy; }
    double determinant() const { return xx * yy - xy * xy; }
};

/// tr(M^-1) of a symmetric 2x2 matrix in closed form; +inf when singular.
inline double trace_of_inverse_2x2(double xx, double xy, double yy) {
    const double tr = xx + yy;
    const double det = xx * yy - xy * xy;
    if (!(tr > 0.0) || det <= kSingularRatio * tr * tr) return kInf;
    return tr / det;
}

/// Evaluator for the jammed anchor-side CRLB. Works either on a selection
/// vector z (jammer k radiates z_k P_k) or directly on radiated powers q.
class JamModel {
public:
    explicit JamModel(const Scenario& s)
        : n_(s.candidate_count()),
          na_(s.anchor_count()),
          prior_(s.prior),
          powers_(s.jam_powers),
          noise_(s.jam_noise),
          gain_(s.jam_channel_gain) {
        validate_jam(s);
        targets_.resize(s.targets.size());
        for (std::size_t i = 0; i < s.targets.size(); ++i) {
            for (const auto& link : s.jam_links[i]) {
                if (link.lambda <= 0.0) continue;
                const double phi = bearing(s.targets[i], s.anchors[static_cast<std::size_t>(link.anchor)]);
                targets_[i].push_back({link.anchor, link.lambda, std::cos(phi), std::sin(phi)});
            }
        }
    }

    int candidate_count() const { return n_; }
    int target_count() const { return static_cast<int>(targets_.size()); }
    std::span<const double> powers() const { return powers_; }

    /// Total jamming power received at every anchor for selection z.
    std::vector<double> interference(std::span<const double> z) const {
        check_size(z);
        std::vector<double> out(static_cast<std::size_t>(na_), 0.0);
        for (int k = 0; k < n_; ++k) {
            const double q = z[static_cast<std::size_t>(k)] * powers_[static_cast<std::size_t>(k)];
            if (q == 0.0) continue;
            for (int j = 0; j < na_; ++j) out[static_cast<std::size_t>(j)] += q * gain_[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        }
        return out;
    }

    /// Same as `interference` with radiated powers given directly.
    std::vector<double> interference_from_power(std::span<const double> q) const {
        check_size(q);
        std::vector<double> out(static_cast<std::size_t>(na_), 0.0);
        for (int k = 0; k < n_; ++k) {
            const double p = q[static_cast<std::size_t>(k)];
            if (p == 0.0) continue;
            for (int j = 0; j < na_; ++j) out[static_cast<std::size_t>(j)] += p * gain_[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        }
        return out;
    }

    /// g_ij = lambda~ / (sigma~_j^2 + sum_k z_k P_k |gamma_kj|^2); 0 for non-LOS anchors.
    double link_weight(int i, int j, std::span<const double> z) const {
        const auto interf = interference(z);
        for (const auto& l : targets_[static_cast<std::size_t>(i)])
            if (l.anchor == j) return l.lambda / (noise_[static_cast<std::size_t>(j)] + interf[static_cast<std::size_t>(j)]);
        return 0.0;
    }

    JamEfim2 efim_at(int i, std::span<const double> interf) const {
        JamEfim2 m;
        for (const auto& l : targets_[static_cast<std::size_t>(i)]) {
            const double g = l.lambda / (noise_[static_cast<std::size_t>(l.anchor)] + interf[static_cast<std::size_t>(l.anchor)]);
            m.weights.push_back(g);
            m.xx += g * l.c * l.c;
            m.xy += g * l.c * l.s;
            m.yy += g * l.s * l.s;
        }
        return m;
    }

    JamEfim2 efim(int i, std::span<const double> z) const { return efim_at(i, interference(z)); }

    double crlb(int i, std::span<const double> z) const {
        const auto m = efim(i, z);
        return trace_of_inverse_2x2(m.xx, m.xy, m.yy);
    }

    double objective_at(std::span<const double> interf) const {
        double f = 0.0;
        for (int i = 0; i < target_count(); ++i) {
            const double w = prior_[static_cast<std::size_t>(i)];
            if (w == 0.0) continue;
            const auto m = efim_at(i, interf);
            const double c = trace_of_inverse_2x2(m.xx, m.xy, m.yy);
            if (!std::isfinite(c)) return kInf;
            f += w * c;
        }
        return f;
    }

    double objective(std::span<const double> z) const { return objective_at(interference(z)); }

    double objective_power(std::span<const double> q) const {
        for (double v : q)
            if (v < 0.0) throw DomainError("radiated powers must be nonnegative");
        return objective_at(interference_from_power(q));
    }

    /// Value and gradient with respect to radiated powers q:
    /// df/dq_l = sum_i w_i sum_j lambda~ |gamma_lj|^2 / den_j^2 |J^-1 phi_ij|^2.
    double value_and_power_gradient(std::span<const double> q, std::span<double> grad) const {
        const auto interf = interference_from_power(q);
        std::vector<double> anchor_sens(static_cast<std::size_t>(na_), 0.0);
        double f = 0.0;
        for (int i = 0; i < target_count(); ++i) {
            const double w = prior_[static_cast<std::size_t>(i)];
            if (w == 0.0) continue;
            const auto m = efim_at(i, interf);
            const double det = m.determinant();
            const double tr = m.trace();
            if (!(tr > 0.0) || det <= kSingularRatio * tr * tr)
                throw EvaluationError("anchor EFIM of target " + std::to_string(i) + " is singular");
            f += w * tr / det;
            // J^-1 = [yy -xy; -xy xx] / det
            const double ixx = m.yy / det, ixy = -m.xy / det, iyy = m.xx / det;
            const auto& links = targets_[static_cast<std::size_t>(i)];
            for (std::size_t e = 0; e < links.size(); ++e) {
                const auto& l = links[e];
                const double vx = ixx * l.c + ixy * l.s;
                const double vy = ixy * l.c + iyy * l.s;
                const double den = noise_[static_cast<std::size_t>(l.anchor)] + interf[static_cast<std::size_t>(l.anchor)];
                anchor_sens[static_cast<std::size_t>(l.anchor)] += w * l.lambda / (den * den) * (vx * vx + vy * vy);
            }
        }
        for (int k = 0; k < n_; ++k) {
            double g = 0.0;
            for (int j = 0; j < na_; ++j) g += gain_[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] * anchor_sens[static_cast<std::size_t>(j)];
            grad[static_cast<std::size_t>(k)] = g;
        }
        return f;
    }

    /// Value and gradient with respect to the selection vector (chain rule q = z * P).
    double value_and_gradient(std::span<const double> z, std::span<double> grad) const {
        check_size(z);
        std::vector<double> q(static_cast<std::size_t>(n_));
        for (int k = 0; k < n_; ++k) q[static_cast<std::size_t>(k)] = z[static_cast<std::size_t>(k)] * powers_[static_cast<std::size_t>(k)];
        const double f = value_and_power_gradient(q, grad);
        for (int k = 0; k < n_; ++k) grad[static_cast<std::size_t>(k)] *= powers_[static_cast<std::size_t>(k)];
        return f;
    }

    std::vector<double> gradient(std::span<const double> z) const {
        std::vector<double> g(static_cast<std::size_t>(n_));
        value_and_gradient(z, g);
        return g;
    }

    std::vector<double> power_gradient(std::span<const double> q) const {
        std::vector<double> g(static_cast<std::size_t>(n_));
        value_and_power_gradient(q, g);
        return g;
    }

private:
    struct Link {
        int anchor;
        double lambda;
        double c;
        double s;
    };

    void check_size(std::span<const double> z) const {
        if (z.size() != static_cast<std::size_t>(n_))
            throw DomainError("vector length " + std::to_string(z.size()) + " != candidate count " +
                              std::to_string(n_));
    }

    int n_;
    int na_;
    std::vector<double> prior_;
    std::vector<double> powers_;
    std::vector<double> noise_;
    std::vector<std::vector<double>> gain_;
    std::vector<std::vector<Link>> targets_;
};

inline double jam_link_weight(const Scenario& s, int i, int j, std::span<const double> z) {
    return JamModel(s).link_weight(i, j, z);
}

inline double jam_crlb(const Scenario& s, int i, std::span<const double> z) { return JamModel(s).crlb(i, z); }

inline double jam_objective(const Scenario& s, std::span<const double> z) { return JamModel(s).objective(z); }

inline std::vector<double> jam_objective_gradient(const Scenario& s, std::span<const double> z) {
    return JamModel(s).gradient(z);
}

inline double jam_objective_power(const Scenario& s, std::span<const double> q) {
    return JamModel(s).objective_power(q);
}

}  // namespace locsec
