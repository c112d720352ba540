#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "locsec/error.hpp"
#include "locsec/scenario.hpp"
#include "locsec/selection.hpp"

namespace locsec {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Relative singularity threshold on det / trace^2 of a 2x2 position EFIM.
inline constexpr double kSingularRatio = 1e-14;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// sin^2((phi_a - phi_b) / 2).
inline double pairwise_angle_factor(double phi_a, double phi_b) {
    const double s = std::sin(0.5 * (phi_a - phi_b));
    return s * s;
}

/// Effective Fisher intensity of one LOS link:
/// (8 pi beta^2 / c^2) (1 - chi) SNR.
inline double lambda_from_signal(double beta_sq, double snr1, double chi) {
    if (!(chi >= 0.0 && chi <= 1.0)) throw DomainError("path-overlap coefficient must lie in [0, 1]");
    if (beta_sq < 0.0 || snr1 < 0.0) throw DomainError("beta^2 and SNR must be nonnegative");
    return 8.0 * std::numbers::pi * beta_sq / (kSpeedOfLight * kSpeedOfLight) * (1.0 - chi) * snr1;
}

/// First-path SNR |alpha|^2 E / (2 sigma^2).
inline double snr_from_channel(double alpha_sq, double energy, double noise_psd) {
    if (!(noise_psd > 0.0)) throw DomainError("noise spectral density must be > 0");
    return alpha_sq * energy / (2.0 * noise_psd);
}

/// Entries of the 3x3 FIM for (position, clock offset) of one target.
struct EavFim3 {
    double K = 0.0;  // sum a cos^2
    double D = 0.0;  // sum a sin cos
    double C = 0.0;  // sum a cos
    double E = 0.0;  // sum a sin^2
    double S = 0.0;  // sum a sin
    double T = 0.0;  // sum a

    Eigen::Matrix3d matrix() const {
        Eigen::Matrix3d m;
        m << K, D, C, D, E, S, C, S, T;
        return m;
    }
};

struct EavFimResult {
    EavFim3 fim;
    Eigen::Matrix2d schur;  // position EFIM after eliminating the clock offset
    double trace = kInf;    // tr(schur^-1), +inf when singular
};

namespace detail {

/// Position EFIM after eliminating the clock offset, accumulated around the
/// weighted mean bearing vector so that degenerate geometries come out
/// singular instead of cancelling to roundoff.
inline Eigen::Matrix2d centered_schur(std::span<const double> a, std::span<const Eigen::Vector2d> u) {
    double total = 0.0;
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (std::size_t e = 0; e < a.size(); ++e) {
        total += a[e];
        mean += a[e] * u[e];
    }
    Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
    if (!(total > 0.0)) return out;
    mean /= total;
    for (std::size_t e = 0; e < a.size(); ++e) {
        const Eigen::Vector2d d = u[e] - mean;
        out.noalias() += a[e] * d * d.transpose();
    }
    return out;
}

inline bool schur_singular(const Eigen::Matrix2d& m) {
    const double tr = m.trace();
    return !(tr > 0.0) || m.determinant() <= kSingularRatio * tr * tr;
}

}  // namespace detail

/// Raw route: assemble the 3x3 FIM link by link from the scenario, eliminate
/// the clock offset, invert.
inline EavFimResult eav_fim_oracle(const Scenario& s, int i, std::span<const double> z) {
    EavFimResult out;
    auto& f = out.fim;
    const auto& x = s.targets[static_cast<std::size_t>(i)];
    std::vector<double> weights;
    std::vector<Eigen::Vector2d> dirs;
    for (const auto& link : s.eav_links[static_cast<std::size_t>(i)]) {
        const double a = z[static_cast<std::size_t>(link.candidate)] * link.lambda;
        if (a == 0.0) continue;
        const double phi = bearing(x, s.candidates[static_cast<std::size_t>(link.candidate)]);
        const double c = std::cos(phi);
        const double sn = std::sin(phi);
        f.K += a * c * c;
        f.D += a * sn * c;
        f.C += a * c;
        f.E += a * sn * sn;
        f.S += a * sn;
        f.T += a;
        weights.push_back(a);
        dirs.emplace_back(c, sn);
    }
    out.schur = detail::centered_schur(weights, dirs);
    if (!(f.T > 0.0) || detail::schur_singular(out.schur)) return out;
    out.trace = out.schur.inverse().trace();
    return out;
}

/// Ordered triple sum of q_{k,l,m} a_k a_l a_m with the bearing-form kernel
/// that falls out of inverting the Schur complement directly.
inline double bearing_triple_sum(std::span<const double> phi, std::span<const double> a) {
    const std::size_t n = phi.size();
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double ck = std::cos(phi[k]);
        const double sk = std::sin(phi[k]);
        for (std::size_t l = 0; l < n; ++l) {
            const double cl = std::cos(phi[l]);
            const double sl = std::sin(phi[l]);
            const double slk = std::sin(phi[l] - phi[k]);
            for (std::size_t m = 0; m < n; ++m) {
                const double sm = std::sin(phi[m]);
                const double q = ck * sl * slk - ck * sm * slk - ck * cl * sm * (sm - sk);
                total += q * a[k] * a[l] * a[m];
            }
        }
    }
    return total;
}

/// Ordered triple sum of p_kl p_lm p_mk a_k a_l a_m.
inline double pairwise_triple_sum(std::span<const double> phi, std::span<const double> a) {
    const std::size_t n = phi.size();
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
            for (std::size_t m = 0; m < n; ++m)
                total += pairwise_angle_factor(phi[k], phi[l]) * pairwise_angle_factor(phi[l], phi[m]) *
                         pairwise_angle_factor(phi[m], phi[k]) * a[k] * a[l] * a[m];
    return total;
}

/// Numerator / denominator of the closed-form CRLB for one target.
struct ClosedFormTerms {
    double numerator = 0.0;    // p~
    double denominator = 0.0;  // r~
    double total = 0.0;        // T, sum of weighted intensities
};

/// Closed-form evaluator. Intensities are aggregated per (target, candidate)
/// since the bearing depends only on the candidate; zero-weight candidates
/// drop out, so binary selections cost O(|support|^3) per target.
class EavModel {
public:
    explicit EavModel(const Scenario& s) : n_(s.candidate_count()), prior_(s.prior) {
        validate_eav(s);
        targets_.resize(s.targets.size());
        for (std::size_t i = 0; i < s.targets.size(); ++i) {
            auto& t = targets_[i];
            std::vector<double> total(static_cast<std::size_t>(n_), 0.0);
            for (const auto& link : s.eav_links[i]) total[static_cast<std::size_t>(link.candidate)] += link.lambda;
            for (int k = 0; k < n_; ++k) {
                if (total[static_cast<std::size_t>(k)] <= 0.0) continue;
                const double phi = bearing(s.targets[i], s.candidates[static_cast<std::size_t>(k)]);
                t.candidate.push_back(k);
                t.lambda.push_back(total[static_cast<std::size_t>(k)]);
                t.phi.push_back(phi);
                t.q.push_back(Eigen::Vector3d(std::cos(phi), std::sin(phi), 1.0));
            }
        }
    }

    int candidate_count() const { return n_; }
    int target_count() const { return static_cast<int>(targets_.size()); }

    ClosedFormTerms closed_form_terms(int i, std::span<const double> z) const {
        const auto& t = targets_[static_cast<std::size_t>(i)];
        thread_local std::vector<double> phi, a;
        phi.clear();
        a.clear();
        ClosedFormTerms out;
        for (std::size_t e = 0; e < t.candidate.size(); ++e) {
            const double w = z[static_cast<std::size_t>(t.candidate[e])] * t.lambda[e];
            if (w == 0.0) continue;
            phi.push_back(t.phi[e]);
            a.push_back(w);
            out.total += w;
        }
        const std::size_t m = phi.size();
        thread_local std::vector<double> p;
        p.assign(m * m, 0.0);
        double pair_sum = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            for (std::size_t l = k + 1; l < m; ++l) {
                const double v = pairwise_angle_factor(phi[k], phi[l]);
                p[k * m + l] = p[l * m + k] = v;
                pair_sum += a[k] * a[l] * v;
            }
        }
        double triple_sum = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            for (std::size_t l = k + 1; l < m; ++l) {
                const double akl = a[k] * a[l] * p[k * m + l];
                if (akl == 0.0) continue;
                for (std::size_t r = l + 1; r < m; ++r) triple_sum += akl * a[r] * p[l * m + r] * p[r * m + k];
            }
        }
        // Ordered sums = 2x (pairs) and 6x (triples) the unordered ones.
        out.numerator = 3.0 * 2.0 * pair_sum;
        out.denominator = 4.0 * 6.0 * triple_sum;
        return out;
    }

    /// tr of the inverse position EFIM, +inf when singular.
    double crlb(int i, std::span<const double> z) const {
        const auto t = closed_form_terms(i, z);
        if (!(t.total > 0.0) || !(t.numerator > 0.0)) return kInf;
        // det(EFIM) <= eps tr(EFIM)^2, with det = (2/3) r~ / T and tr = (2/3) p~ / T.
        if (t.denominator <= kSingularRatio * (2.0 / 3.0) * t.numerator * t.numerator / t.total) return kInf;
        return t.numerator / t.denominator;
    }

    double objective(std::span<const double> z) const {
        check_size(z);
        double f = 0.0;
        for (int i = 0; i < target_count(); ++i) {
            const double w = prior_[static_cast<std::size_t>(i)];
            if (w == 0.0) continue;
            const double c = crlb(i, z);
            if (!std::isfinite(c)) return kInf;
            f += w * c;
        }
        return f;
    }

    /// Objective through the FIM with the clock offset eliminated; +inf where singular.
    double objective_fim(std::span<const double> z) const {
        check_size(z);
        double f = 0.0;
        for (int i = 0; i < target_count(); ++i) {
            const double w = prior_[static_cast<std::size_t>(i)];
            if (w == 0.0) continue;
            Eigen::Matrix2d inv;
            Eigen::Vector2d mean;
            if (!efim_inverse(i, z, inv, mean)) return kInf;
            f += w * inv.trace();
        }
        return f;
    }

    /// Value and exact gradient: d/dz_k tr(P J^-1 P') = -lambda_k |P J^-1 q_k|^2.
    /// Throws EvaluationError where the FIM of a weighted target is singular.
    double value_and_gradient(std::span<const double> z, std::span<double> grad) const {
        check_size(z);
        std::fill(grad.begin(), grad.end(), 0.0);
        double f = 0.0;
        for (int i = 0; i < target_count(); ++i) {
            const double w = prior_[static_cast<std::size_t>(i)];
            if (w == 0.0) continue;
            Eigen::Matrix2d inv;
            Eigen::Vector2d mean;
            if (!efim_inverse(i, z, inv, mean))
                throw EvaluationError("eavesdropper FIM of target " + std::to_string(i) +
                                      " is singular; evaluate at an interior point");
            f += w * inv.trace();
            // The top rows of J^-1 applied to q_k reduce to S^-1 (u_k - mean).
            const auto& t = targets_[static_cast<std::size_t>(i)];
            for (std::size_t e = 0; e < t.candidate.size(); ++e) {
                const Eigen::Vector2d v = inv * (t.q[e].head<2>() - mean);
                grad[static_cast<std::size_t>(t.candidate[e])] -= w * t.lambda[e] * v.squaredNorm();
            }
        }
        return f;
    }

    std::vector<double> gradient(std::span<const double> z) const {
        std::vector<double> g(static_cast<std::size_t>(n_));
        value_and_gradient(z, g);
        return g;
    }

private:
    struct TargetTerms {
        std::vector<int> candidate;
        std::vector<double> lambda;
        std::vector<double> phi;
        std::vector<Eigen::Vector3d> q;
    };

    void check_size(std::span<const double> z) const {
        if (z.size() != static_cast<std::size_t>(n_))
            throw DomainError("selection length " + std::to_string(z.size()) + " != candidate count " +
                              std::to_string(n_));
    }

    /// Inverse of the position EFIM S = sum a (u - mean)(u - mean)' and the
    /// weighted mean bearing vector. Working with S directly avoids inverting
    /// the badly conditioned 3x3 FIM near singular geometries.
    bool efim_inverse(int i, std::span<const double> z, Eigen::Matrix2d& inv, Eigen::Vector2d& mean) const {
        const auto& t = targets_[static_cast<std::size_t>(i)];
        double total = 0.0;
        mean.setZero();
        for (std::size_t e = 0; e < t.candidate.size(); ++e) {
            const double a = z[static_cast<std::size_t>(t.candidate[e])] * t.lambda[e];
            total += a;
            mean += a * t.q[e].head<2>();
        }
        if (!(total > 0.0)) return false;
        mean /= total;
        Eigen::Matrix2d schur = Eigen::Matrix2d::Zero();
        for (std::size_t e = 0; e < t.candidate.size(); ++e) {
            const double a = z[static_cast<std::size_t>(t.candidate[e])] * t.lambda[e];
            if (a == 0.0) continue;
            const Eigen::Vector2d d = t.q[e].head<2>() - mean;
            schur.noalias() += a * d * d.transpose();
        }
        if (detail::schur_singular(schur)) return false;
        inv = schur.inverse();
        return true;
    }

    int n_;
    std::vector<double> prior_;
    std::vector<TargetTerms> targets_;
};

inline double eav_crlb_closed_form(const Scenario& s, int i, std::span<const double> z) {
    return EavModel(s).crlb(i, z);
}

inline double eav_objective(const Scenario& s, std::span<const double> z) { return EavModel(s).objective(z); }

inline std::vector<double> eav_objective_gradient(const Scenario& s, std::span<const double> z) {
    return EavModel(s).gradient(z);
}

}  // namespace locsec
