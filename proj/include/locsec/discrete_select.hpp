#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locsec/eav_metrics.hpp"
#include "locsec/error.hpp"
#include "locsec/jam_metrics.hpp"
#include "locsec/relax_solver.hpp"
#include "locsec/rng.hpp"
#include "locsec/scenario.hpp"
#include "locsec/selection.hpp"
#include "locsec/uncertainty.hpp"

namespace locsec {

enum class Sense { minimize, maximize };

/// Ones at the m largest weights, ties to the lowest index.
inline SelectionVector round_largest_m(std::span<const double> z, int m) {
    const int n = static_cast<int>(z.size());
    if (m < 0 || m > n) throw DomainError("m = " + std::to_string(m) + " outside [0, " + std::to_string(n) + "]");
    std::vector<int> order(z.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return z[static_cast<std::size_t>(a)] > z[static_cast<std::size_t>(b)]; });
    order.resize(static_cast<std::size_t>(m));
    return SelectionVector::from_indices(n, order);
}

/// Binary subset problem seen by the swap search and the exhaustive oracle.
struct SubsetProblem {
    int n = 0;
    Sense sense = Sense::minimize;
    std::function<double(std::span<const double>)> value;
    std::function<bool(std::span<const double>)> admissible;  // empty = always

    bool better(double a, double b) const { return sense == Sense::minimize ? a < b : a > b; }
    /// better() by more than roundoff; values within 1e-12 relative tie.
    bool clearly_better(double a, double b) const {
        if (!better(a, b)) return false;
        if (!std::isfinite(a) || !std::isfinite(b)) return true;
        return std::abs(a - b) > 1e-12 * std::max(std::abs(a), std::abs(b));
    }
    bool allowed(std::span<const double> z) const { return !admissible || admissible(z); }

    /// f through the 3x3 FIM route (O(N) per target).
    static SubsetProblem eav(const EavModel& model) {
        return {model.candidate_count(), Sense::minimize,
                [&model](std::span<const double> z) { return model.objective_fim(z); }, {}};
    }

    /// f~, with selections limited to sum z_k P_k <= budget.
    static SubsetProblem jam(const JamModel& model, double budget) {
        SubsetProblem p{model.candidate_count(), Sense::maximize,
                        [&model](std::span<const double> z) { return model.objective(z); }, {}};
        if (std::isfinite(budget)) {
            p.admissible = [&model, budget](std::span<const double> z) {
                double used = 0.0;
                for (std::size_t k = 0; k < z.size(); ++k) used += z[k] * model.powers()[k];
                return used <= budget * (1.0 + 1e-12);
            };
        }
        return p;
    }
};

struct SelectionOutcome {
    std::string algorithm;  // relaxed-bound, largest-m, swap, exhaustive, swap-random
    SelectionVector z;      // z^J in joint mode
    SelectionVector z_eav;  // joint mode only
    double objective = kInf;
    double eav_objective = kInf;  // joint mode: f(z^E)
    int swaps = 0;
    bool feasible = true;
    double wall_ms = 0.0;
    std::optional<std::uint64_t> seed;  // random initialization only
};

namespace select_detail {

inline bool within_gap(double reference, double value, double mu) {
    if (!std::isfinite(reference) || !std::isfinite(value)) return false;
    return std::abs(reference - value) <= mu * std::abs(reference);
}

inline std::uint64_t binomial(int n, int m) {
    if (m < 0 || m > n) return 0;
    m = std::min(m, n - m);
    double r = 1.0;
    for (int i = 1; i <= m; ++i) r = r * (n - m + i) / i;
    return r > 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(std::llround(r));
}

/// Calls fn(indices) for every m-subset of {0..n-1} in lexicographic order.
template <class Fn>
void for_each_subset(int n, int m, Fn&& fn) {
    std::vector<int> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    if (m > n) return;
    while (true) {
        fn(std::span<const int>(idx));
        int i = m - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - m + i) --i;
        if (i < 0) return;
        ++idx[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < m; ++k) idx[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(k - 1)] + 1;
    }
}

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace select_detail

/// Single-swap local search started from z0 (Algorithm "swap").
///
/// Returns z0 untouched when its value is within mu (relative) of the relaxed
/// bound. Otherwise moves to the best single swap (values within 1e-12
/// relative tie, ties to the lowest (out, in) pair) until that swap's change
/// is within mu of the current value or max_swaps moves were made. A best neighbor that does not improve ends
/// the search at the current vector, so the result is never worse than z0.
inline SelectionOutcome swap_search(const SubsetProblem& p, const SelectionVector& z0, double relaxed_value, double mu,
                                    int max_swaps) {
    if (mu < 0.0) throw DomainError("mu must be nonnegative");
    if (max_swaps < 0) throw DomainError("max_swaps must be nonnegative");
    if (z0.mode() != SelectionMode::binary || z0.size() != static_cast<std::size_t>(p.n))
        throw DomainError("swap search needs a binary start of length " + std::to_string(p.n));
    SelectionOutcome out;
    out.algorithm = "swap";
    std::vector<double> cur(z0.weights().begin(), z0.weights().end());
    double f = p.value(cur);
    out.z = z0;
    out.objective = f;
    if (max_swaps == 0 || select_detail::within_gap(relaxed_value, f, mu)) return out;

    std::vector<double> trial;
    for (int c = 1;; ++c) {
        std::vector<int> in_set, out_set;
        for (int k = 0; k < p.n; ++k) (cur[static_cast<std::size_t>(k)] != 0.0 ? in_set : out_set).push_back(k);
        int best_out = -1, best_in = -1;
        double best = 0.0;
        trial = cur;
        for (int o : in_set) {
            trial[static_cast<std::size_t>(o)] = 0.0;
            for (int i : out_set) {
                trial[static_cast<std::size_t>(i)] = 1.0;
                if (p.allowed(trial)) {
                    const double v = p.value(trial);
                    if (best_out < 0 || p.clearly_better(v, best)) {
                        best = v;
                        best_out = o;
                        best_in = i;
                    }
                }
                trial[static_cast<std::size_t>(i)] = 0.0;
            }
            trial[static_cast<std::size_t>(o)] = 1.0;
        }
        if (best_out < 0 || !p.better(best, f)) break;
        cur[static_cast<std::size_t>(best_out)] = 0.0;
        cur[static_cast<std::size_t>(best_in)] = 1.0;
        const double prev = f;
        f = best;
        out.swaps = c;
        if (select_detail::within_gap(prev, f, mu) || c >= max_swaps) break;
    }
    out.z = SelectionVector::binary(cur);
    out.objective = f;
    return out;
}

/// Exhaustive search over all admissible m-subsets; ties (within 1e-12
/// relative) go to the lexicographically smallest index set. When every subset has an infinite
/// (or no admissible) value the first one is returned with feasible = false.
inline SelectionOutcome exhaustive_select(const SubsetProblem& p, int m, std::uint64_t cap = 2'000'000) {
    if (m < 0 || m > p.n) throw DomainError("m = " + std::to_string(m) + " outside [0, " + std::to_string(p.n) + "]");
    const auto count = select_detail::binomial(p.n, m);
    if (count > cap)
        throw EnumerationCapError("exhaustive search over C(" + std::to_string(p.n) + ", " + std::to_string(m) +
                                  ") = " + std::to_string(count) + " subsets exceeds the cap of " + std::to_string(cap));
    SelectionOutcome out;
    out.algorithm = "exhaustive";
    std::vector<double> z(static_cast<std::size_t>(p.n), 0.0);
    std::vector<int> best_idx;
    double best = 0.0;
    bool have = false;
    select_detail::for_each_subset(p.n, m, [&](std::span<const int> idx) {
        for (int k : idx) z[static_cast<std::size_t>(k)] = 1.0;
        if (p.allowed(z)) {
            const double v = p.value(z);
            if (!have || p.clearly_better(v, best)) {
                best = v;
                best_idx.assign(idx.begin(), idx.end());
                have = true;
            }
        }
        for (int k : idx) z[static_cast<std::size_t>(k)] = 0.0;
    });
    if (!have) {
        std::vector<int> first(static_cast<std::size_t>(m));
        std::iota(first.begin(), first.end(), 0);
        out.z = SelectionVector::from_indices(p.n, first);
        out.objective = p.value(out.z);
        out.feasible = false;
        return out;
    }
    out.z = SelectionVector::from_indices(p.n, best_idx);
    out.objective = best;
    out.feasible = std::isfinite(best);
    return out;
}

/// Joint selection: maximize f~(z^J) subject to f(z^E) <= rho, disjoint sets.
struct JointProblem {
    const EavModel* eav = nullptr;
    const JamModel* jam = nullptr;
    int n_eav = 0;
    int n_jam = 0;
    double rho = kInf;
    double budget = kInf;

    int n() const { return eav->candidate_count(); }

    bool budget_ok(std::span<const double> zj) const {
        if (!std::isfinite(budget)) return true;
        double used = 0.0;
        for (std::size_t k = 0; k < zj.size(); ++k) used += zj[k] * jam->powers()[k];
        return used <= budget * (1.0 + 1e-12);
    }
};

namespace select_detail {

struct JointState {
    std::vector<double> ze, zj;
    double fe = kInf, fj = -kInf;
    bool feasible = false;
};

inline JointState evaluate_joint(const JointProblem& p, std::vector<double> ze, std::vector<double> zj) {
    JointState s{std::move(ze), std::move(zj)};
    s.fe = p.eav->objective_fim(s.ze);
    s.fj = p.jam->objective(s.zj);
    s.feasible = s.fe <= p.rho;
    return s;
}

/// Feasible beats infeasible; feasible states compare on f~, infeasible ones on f.
inline bool joint_better(const JointState& a, const JointState& b) {
    if (a.feasible != b.feasible) return a.feasible;
    return a.feasible ? a.fj > b.fj : a.fe < b.fe;
}

inline SelectionOutcome joint_outcome(const JointState& st, const char* tag) {
    SelectionOutcome out;
    out.algorithm = tag;
    out.z = SelectionVector::binary(st.zj);
    out.z_eav = SelectionVector::binary(st.ze);
    out.objective = st.fj;
    out.eav_objective = st.fe;
    out.feasible = st.feasible;
    return out;
}

}  // namespace select_detail

/// Swap search for the joint problem. A move takes one jammer off position o
/// and puts it on position i; if i held an eavesdropper, that eavesdropper
/// moves to o. Feasible moves are preferred; from an infeasible start the
/// search takes moves that lower f(z^E) until it becomes feasible.
inline SelectionOutcome swap_search_joint(const JointProblem& p, const SelectionVector& ze0, const SelectionVector& zj0,
                                          double relaxed_value, double mu, int max_swaps) {
    if (mu < 0.0) throw DomainError("mu must be nonnegative");
    if (max_swaps < 0) throw DomainError("max_swaps must be nonnegative");
    const int n = p.n();
    for (int k = 0; k < n; ++k)
        if (ze0[static_cast<std::size_t>(k)] != 0.0 && zj0[static_cast<std::size_t>(k)] != 0.0)
            throw DomainError("joint start has an eavesdropper and a jammer at position " + std::to_string(k));
    auto cur = select_detail::evaluate_joint(p, {ze0.weights().begin(), ze0.weights().end()},
                                             {zj0.weights().begin(), zj0.weights().end()});
    int swaps = 0;
    const bool skip = max_swaps == 0 || (cur.feasible && select_detail::within_gap(relaxed_value, cur.fj, mu));
    for (int c = 1; !skip; ++c) {
        std::optional<select_detail::JointState> best;
        for (int o = 0; o < n; ++o) {
            if (cur.zj[static_cast<std::size_t>(o)] == 0.0) continue;
            for (int i = 0; i < n; ++i) {
                if (cur.zj[static_cast<std::size_t>(i)] != 0.0) continue;
                auto zj = cur.zj;
                auto ze = cur.ze;
                zj[static_cast<std::size_t>(o)] = 0.0;
                zj[static_cast<std::size_t>(i)] = 1.0;
                if (ze[static_cast<std::size_t>(i)] != 0.0) {
                    ze[static_cast<std::size_t>(i)] = 0.0;
                    ze[static_cast<std::size_t>(o)] = 1.0;
                }
                if (!p.budget_ok(zj)) continue;
                auto st = select_detail::evaluate_joint(p, std::move(ze), std::move(zj));
                if (!best || select_detail::joint_better(st, *best)) best = std::move(st);
            }
        }
        if (!best || !select_detail::joint_better(*best, cur)) break;
        const bool both_feasible = cur.feasible && best->feasible;
        const double prev = cur.fj;
        cur = std::move(*best);
        swaps = c;
        if ((both_feasible && select_detail::within_gap(prev, cur.fj, mu)) || c >= max_swaps) break;
    }
    auto out = select_detail::joint_outcome(cur, "swap");
    out.swaps = swaps;
    return out;
}

/// Exhaustive joint oracle over all admissible jammer sets and all
/// eavesdropper sets on the remaining positions. Among feasible pairs the
/// best f~ wins (ties: lexicographically first jammer set, then the
/// eavesdropper set with the smallest f). Without any feasible pair the pair
/// with the smallest f is returned with feasible = false.
inline SelectionOutcome exhaustive_select_joint(const JointProblem& p, std::uint64_t cap = 2'000'000) {
    const int n = p.n();
    if (p.n_eav + p.n_jam > n) throw InfeasibleError("n_eav + n_jam exceeds N");
    const auto count =
        select_detail::binomial(n, p.n_jam) * static_cast<double>(select_detail::binomial(n - p.n_jam, p.n_eav));
    if (count > static_cast<double>(cap))
        throw EnumerationCapError("exhaustive joint search over " + std::to_string(static_cast<std::uint64_t>(count)) +
                                  " pairs exceeds the cap of " + std::to_string(cap));
    std::optional<select_detail::JointState> best;
    std::vector<double> zj(static_cast<std::size_t>(n), 0.0);
    select_detail::for_each_subset(n, p.n_jam, [&](std::span<const int> jidx) {
        std::fill(zj.begin(), zj.end(), 0.0);
        for (int k : jidx) zj[static_cast<std::size_t>(k)] = 1.0;
        if (!p.budget_ok(zj)) return;
        const double fj = p.jam->objective(zj);
        std::vector<int> free;
        for (int k = 0; k < n; ++k)
            if (zj[static_cast<std::size_t>(k)] == 0.0) free.push_back(k);
        select_detail::for_each_subset(static_cast<int>(free.size()), p.n_eav, [&](std::span<const int> eidx) {
            std::vector<double> ze(static_cast<std::size_t>(n), 0.0);
            for (int e : eidx) ze[static_cast<std::size_t>(free[static_cast<std::size_t>(e)])] = 1.0;
            select_detail::JointState st{std::move(ze), zj};
            st.fe = p.eav->objective_fim(st.ze);
            st.fj = fj;
            st.feasible = st.fe <= p.rho;
            if (!best || select_detail::joint_better(st, *best) ||
                (st.feasible && best->feasible && st.fj == best->fj && st.zj == best->zj && st.fe < best->fe))
                best = std::move(st);
        });
    });
    if (!best) throw InfeasibleError("no jammer set satisfies the power budget");
    return select_detail::joint_outcome(*best, "exhaustive");
}

/// Worst-case eavesdropper intensities lambda-hat - delta.
inline Scenario robust_eav_effective(const Scenario& s, const UncertaintyModel& u) {
    validate(u, s);
    Scenario out = s;
    if (u.eav_delta.empty()) return out;
    for (std::size_t i = 0; i < out.eav_links.size(); ++i)
        for (std::size_t e = 0; e < out.eav_links[i].size(); ++e)
            out.eav_links[i][e].lambda = std::max(0.0, out.eav_links[i][e].lambda - u.eav_delta[i][e]);
    return out;
}

/// Worst-case anchor intensities lambda~-hat + delta~.
inline Scenario robust_jam_effective(const Scenario& s, const UncertaintyModel& u) {
    validate(u, s);
    Scenario out = s;
    if (u.jam_delta.empty()) return out;
    for (std::size_t i = 0; i < out.jam_links.size(); ++i)
        for (std::size_t e = 0; e < out.jam_links[i].size(); ++e) out.jam_links[i][e].lambda += u.jam_delta[i][e];
    return out;
}

enum class PipelineMode { eav, jam, joint };

struct PipelineParams {
    PipelineMode mode = PipelineMode::eav;
    int n_eav = 0;
    int n_jam = 0;
    double rho = kInf;
    double mu = 0.01;
    int max_swaps = 5;
    bool exhaustive = false;
    std::uint64_t exhaustive_cap = 2'000'000;
    std::vector<std::uint64_t> random_seeds;  // one swap-random outcome per seed
    int random_max_swaps = 5;
    SolverOptions solver{};
};

namespace select_detail {

template <class Fn>
auto staged(const char* stage, Fn&& fn) -> decltype(fn()) {
    const std::string prefix = std::string(stage) + ": ";
    try {
        return fn();
    } catch (const RhoInfeasibleError& e) {
        throw RhoInfeasibleError(prefix + e.what());
    } catch (const InformationInfeasibleError& e) {
        throw InformationInfeasibleError(prefix + e.what());
    } catch (const InfeasibleError& e) {
        throw InfeasibleError(prefix + e.what());
    } catch (const EnumerationCapError& e) {
        throw EnumerationCapError(prefix + e.what());
    } catch (const EvaluationError& e) {
        throw EvaluationError(prefix + e.what());
    } catch (const SolverError& e) {
        throw SolverError(prefix + e.what());
    } catch (const DomainError& e) {
        throw DomainError(prefix + e.what());
    }
}

/// Largest-m rounding that skips positions breaking the power budget.
inline SelectionVector round_within_budget(std::span<const double> z, int m, const SubsetProblem& p) {
    auto plain = round_largest_m(z, m);
    if (p.allowed(plain)) return plain;
    std::vector<int> order(z.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return z[static_cast<std::size_t>(a)] > z[static_cast<std::size_t>(b)]; });
    std::vector<double> pick(z.size(), 0.0);
    int taken = 0;
    for (int k : order) {
        if (taken == m) break;
        pick[static_cast<std::size_t>(k)] = 1.0;
        if (p.allowed(pick))
            ++taken;
        else
            pick[static_cast<std::size_t>(k)] = 0.0;
    }
    if (taken < m) throw InfeasibleError("no budget-feasible rounding of the relaxed solution");
    return SelectionVector::binary(pick);
}

inline std::vector<int> random_admissible(const SubsetProblem& p, int m, std::uint64_t seed) {
    Rng rng(seed);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        auto idx = rng.sample_without_replacement(p.n, m);
        if (p.allowed(SelectionVector::from_indices(p.n, idx))) return idx;
    }
    throw InfeasibleError("no budget-feasible random start found for seed " + std::to_string(seed));
}

}  // namespace select_detail

/// Relaxed solve, largest-m rounding and swap search, plus the optional
/// exhaustive and random-start baselines. Each stage's failure is rethrown
/// with the stage name prepended.
inline std::vector<SelectionOutcome> select_pipeline(const Scenario& s, const PipelineParams& params) {
    using clock = std::chrono::steady_clock;
    using select_detail::elapsed_ms;
    using select_detail::staged;
    std::vector<SelectionOutcome> outs;
    const auto t0 = clock::now();

    if (params.mode == PipelineMode::joint) {
        const EavModel eav(s);
        const JamModel jam(s);
        const int n = eav.candidate_count();
        JointProblem jp{&eav, &jam, params.n_eav, params.n_jam, params.rho, s.power_budget};
        const auto rep =
            staged("relaxed", [&] { return solve_relaxed_joint(s, params.n_eav, params.n_jam, params.rho, params.solver); });
        const double relaxed_ms = elapsed_ms(t0);
        SelectionOutcome bound;
        bound.algorithm = "relaxed-bound";
        std::vector<double> zj_clamped(rep.z), ze_clamped(rep.z_eav);
        for (auto& v : zj_clamped) v = std::clamp(v, 0.0, 1.0);
        for (auto& v : ze_clamped) v = std::clamp(v, 0.0, 1.0);
        bound.z = SelectionVector::relaxed(zj_clamped);
        bound.z_eav = SelectionVector::relaxed(ze_clamped);
        bound.objective = rep.objective;
        bound.eav_objective = rep.eav_objective;
        bound.feasible = rep.eav_objective <= params.rho;
        bound.wall_ms = relaxed_ms;
        outs.push_back(bound);

        const auto t1 = clock::now();
        const auto jam_problem = SubsetProblem::jam(jam, s.power_budget);
        const auto zj = staged("largest-m", [&] { return select_detail::round_within_budget(rep.z, params.n_jam, jam_problem); });
        std::vector<double> ze(static_cast<std::size_t>(n), 0.0);
        if (params.n_eav + params.n_jam == n) {
            for (int k = 0; k < n; ++k) ze[static_cast<std::size_t>(k)] = 1.0 - zj[static_cast<std::size_t>(k)];
        } else {
            std::vector<double> masked(rep.z_eav);
            for (int k = 0; k < n; ++k)
                if (zj[static_cast<std::size_t>(k)] != 0.0) masked[static_cast<std::size_t>(k)] = -1.0;
            const auto rounded = round_largest_m(masked, params.n_eav);
            ze.assign(rounded.weights().begin(), rounded.weights().end());
        }
        auto lm = select_detail::joint_outcome(
            select_detail::evaluate_joint(jp, ze, {zj.weights().begin(), zj.weights().end()}), "largest-m");
        lm.wall_ms = relaxed_ms + elapsed_ms(t1);
        outs.push_back(lm);

        const auto t2 = clock::now();
        auto sw = staged("swap", [&] {
            return swap_search_joint(jp, lm.z_eav, lm.z, rep.objective, params.mu, params.max_swaps);
        });
        sw.wall_ms = lm.wall_ms + elapsed_ms(t2);
        outs.push_back(sw);

        if (params.exhaustive) {
            const auto t3 = clock::now();
            auto ex = staged("exhaustive", [&] { return exhaustive_select_joint(jp, params.exhaustive_cap); });
            ex.wall_ms = elapsed_ms(t3);
            outs.push_back(ex);
        }
        for (auto seed : params.random_seeds) {
            const auto t4 = clock::now();
            auto r = staged("swap-random", [&] {
                auto jidx = select_detail::random_admissible(jam_problem, params.n_jam, seed);
                const auto zjr = SelectionVector::from_indices(n, jidx);
                std::vector<int> free;
                for (int k = 0; k < n; ++k)
                    if (zjr[static_cast<std::size_t>(k)] == 0.0) free.push_back(k);
                Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
                std::vector<int> eidx;
                for (int e : rng.sample_without_replacement(static_cast<int>(free.size()), params.n_eav))
                    eidx.push_back(free[static_cast<std::size_t>(e)]);
                return swap_search_joint(jp, SelectionVector::from_indices(n, eidx), zjr, rep.objective, params.mu,
                                         params.random_max_swaps);
            });
            r.algorithm = "swap-random";
            r.seed = seed;
            r.wall_ms = elapsed_ms(t4);
            outs.push_back(r);
        }
        return outs;
    }

    const bool eav_mode = params.mode == PipelineMode::eav;
    const int m = eav_mode ? params.n_eav : params.n_jam;
    std::optional<EavModel> eav;
    std::optional<JamModel> jam;
    if (eav_mode)
        eav.emplace(s);
    else
        jam.emplace(s);
    const auto problem = eav_mode ? SubsetProblem::eav(*eav) : SubsetProblem::jam(*jam, s.power_budget);

    const auto rep = staged("relaxed", [&] {
        return eav_mode ? solve_relaxed_eav(s, m, params.solver) : solve_relaxed_jam(s, m, params.solver);
    });
    const double relaxed_ms = elapsed_ms(t0);
    SelectionOutcome bound;
    bound.algorithm = "relaxed-bound";
    std::vector<double> clamped(rep.z);
    for (auto& v : clamped) v = std::clamp(v, 0.0, 1.0);
    bound.z = SelectionVector::relaxed(clamped);
    bound.objective = rep.objective;
    bound.wall_ms = relaxed_ms;
    outs.push_back(bound);

    const auto t1 = clock::now();
    SelectionOutcome lm;
    lm.algorithm = "largest-m";
    lm.z = staged("largest-m", [&] { return select_detail::round_within_budget(rep.z, m, problem); });
    lm.objective = problem.value(lm.z);
    lm.feasible = std::isfinite(lm.objective);
    lm.wall_ms = relaxed_ms + elapsed_ms(t1);
    outs.push_back(lm);

    const auto t2 = clock::now();
    auto sw = staged("swap", [&] { return swap_search(problem, lm.z, rep.objective, params.mu, params.max_swaps); });
    sw.feasible = std::isfinite(sw.objective);
    sw.wall_ms = lm.wall_ms + elapsed_ms(t2);
    outs.push_back(sw);

    if (params.exhaustive) {
        const auto t3 = clock::now();
        auto ex = staged("exhaustive", [&] { return exhaustive_select(problem, m, params.exhaustive_cap); });
        ex.wall_ms = elapsed_ms(t3);
        outs.push_back(ex);
    }
    for (auto seed : params.random_seeds) {
        const auto t4 = clock::now();
        auto r = staged("swap-random", [&] {
            const auto idx = select_detail::random_admissible(problem, m, seed);
            return swap_search(problem, SelectionVector::from_indices(problem.n, idx), rep.objective, params.mu,
                               params.random_max_swaps);
        });
        r.algorithm = "swap-random";
        r.seed = seed;
        r.feasible = std::isfinite(r.objective);
        r.wall_ms = elapsed_ms(t4);
        outs.push_back(r);
    }
    return outs;
}

}  // namespace locsec
