#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "locsec/eav_metrics.hpp"
#include "locsec/error.hpp"
#include "locsec/jam_metrics.hpp"
#include "locsec/projection.hpp"
#include "locsec/rng.hpp"
#include "locsec/scenario.hpp"

namespace locsec {

struct SolverOptions {
    double initial_step = 1.0;
    double shrink = 0.5;
    double armijo = 1e-4;
    double relative_tolerance = 1e-8;
    int stall_iterations = 5;
    int max_iterations = 10000;
    int max_backtracks = 60;
    // Barzilai-Borwein trial steps after the first iteration.
    bool spectral_steps = true;
    int restarts = 20;
    std::uint64_t restart_seed = 0;
    // Log-barrier schedule for the joint problem.
    double barrier_start = 1.0;
    double barrier_end = 1e-6;
    double barrier_factor = 0.1;
    ProjectionOptions projection{};
};

struct SolverReport {
    std::vector<double> z;      // eav / jam / power solution, or z^J in joint mode
    std::vector<double> z_eav;  // joint mode only
    double objective = kInf;    // f, f~ or f~(z^J)
    double eav_objective = kInf;  // joint mode: f(z^E)
    int iterations = 0;
    double step = 0.0;
    double relative_change = 0.0;
    double residual = 0.0;
    bool converged = false;
};

namespace solver_detail {

using ValueGrad = std::function<double(std::span<const double>, std::span<double>)>;
using Value = std::function<double(std::span<const double>)>;

struct PgResult {
    std::vector<double> x;
    double value = kInf;
    int iterations = 0;
    double step = 0.0;
    double relative_change = 0.0;
    bool converged = false;
};

/// Minimizes a function over the feasible set by projected gradient with
/// Armijo backtracking along the projection arc. `value` may return +inf;
/// `value_grad` is only called at points where `value` is finite.
inline PgResult projected_gradient(const Value& value, const ValueGrad& value_grad, std::vector<double> x,
                                   const FeasibleSet& set, const SolverOptions& o) {
    const std::size_t n = x.size();
    PgResult r;
    std::vector<double> g(n), g_prev(n), x_prev(n), trial(n), candidate;
    double f = value_grad(x, g);
    double step = o.initial_step;
    int stall = 0;
    r.converged = false;
    int it = 0;
    for (; it < o.max_iterations; ++it) {
        if (it > 0 && o.spectral_steps) {
            double ss = 0.0, sy = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double s = x[k] - x_prev[k];
                ss += s * s;
                sy += s * (g[k] - g_prev[k]);
            }
            step = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : o.initial_step;
        } else if (it == 0) {
            step = o.initial_step;
        }
        bool accepted = false;
        double f_new = f;
        for (int bt = 0; bt <= o.max_backtracks; ++bt) {
            for (std::size_t k = 0; k < n; ++k) trial[k] = x[k] - step * g[k];
            candidate = project_polytope(trial, set, o.projection);
            double decrease = 0.0;
            double moved = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                decrease += g[k] * (candidate[k] - x[k]);
                moved = std::max(moved, std::abs(candidate[k] - x[k]));
            }
            if (moved == 0.0) {
                // Projected gradient step is a fixed point: stationary.
                r.converged = true;
                break;
            }
            f_new = value(candidate);
            if (std::isfinite(f_new) && f_new <= f + o.armijo * decrease) {
                accepted = true;
                break;
            }
            step *= o.shrink;
        }
        if (!accepted) {
            r.converged = true;
            break;
        }
        x_prev = x;
        g_prev = g;
        x = candidate;
        const double f_old = f;
        f = value_grad(x, g);
        r.relative_change = std::abs(f_old - f) / std::max(std::abs(f_old), std::numeric_limits<double>::min());
        stall = r.relative_change < o.relative_tolerance ? stall + 1 : 0;
        if (stall >= o.stall_iterations) {
            r.converged = true;
            ++it;
            break;
        }
    }
    r.x = std::move(x);
    r.value = f;
    r.iterations = it;
    r.step = step;
    return r;
}

/// Feasible starting points: the projected uniform point, then seeded
/// random perturbations of it. Returns the first with a finite value.
inline std::vector<double> finite_start(const Value& value, const std::vector<double>& uniform,
                                        const FeasibleSet& set, const SolverOptions& o, bool& found) {
    auto x = project_polytope(uniform, set, o.projection);
    found = std::isfinite(value(x));
    if (found) return x;
    Rng rng(o.restart_seed);
    for (int r = 0; r < o.restarts; ++r) {
        std::vector<double> y(uniform.size());
        for (std::size_t k = 0; k < y.size(); ++k) y[k] = uniform[k] + rng.uniform(-0.5, 0.5);
        auto p = project_polytope(y, set, o.projection);
        if (std::isfinite(value(p))) {
            found = true;
            return p;
        }
    }
    return x;
}

inline SolverReport to_report(PgResult&& r, const FeasibleSet& set) {
    SolverReport rep;
    rep.residual = set.residual(r.x);
    rep.z = std::move(r.x);
    rep.objective = r.value;
    rep.iterations = r.iterations;
    rep.step = r.step;
    rep.relative_change = r.relative_change;
    rep.converged = r.converged;
    return rep;
}

inline void check_count(int m, int n, const char* what) {
    if (m < 1 || m > n)
        throw DomainError(std::string(what) + " = " + std::to_string(m) + " must lie in [1, " + std::to_string(n) +
                          "]");
}

}  // namespace solver_detail

/// Relaxed eavesdropper selection: minimize f(z) over the capped simplex.
inline SolverReport solve_relaxed_eav(const Scenario& s, int n_eav, const SolverOptions& o = {}) {
    const EavModel model(s);
    const int n = model.candidate_count();
    solver_detail::check_count(n_eav, n, "n_eav");
    const auto set = FeasibleSet::capped_simplex(n, n_eav);
    auto value = [&](std::span<const double> z) { return model.objective_fim(z); };
    auto value_grad = [&](std::span<const double> z, std::span<double> g) { return model.value_and_gradient(z, g); };
    bool found = false;
    const std::vector<double> uniform(static_cast<std::size_t>(n), static_cast<double>(n_eav) / n);
    auto x0 = solver_detail::finite_start(value, uniform, set, o, found);
    if (!found)
        throw InformationInfeasibleError("eavesdropper objective is infinite at the uniform point and at " +
                                         std::to_string(o.restarts) + " perturbed restarts");
    return solver_detail::to_report(solver_detail::projected_gradient(value, value_grad, std::move(x0), set, o), set);
}

/// Relaxed jammer selection: maximize f~(z) over the capped simplex with the
/// power budget sum z_k P_k <= P_T.
inline SolverReport solve_relaxed_jam(const Scenario& s, int n_jam, const SolverOptions& o = {}) {
    const JamModel model(s);
    const int n = model.candidate_count();
    solver_detail::check_count(n_jam, n, "n_jam");
    const auto set = FeasibleSet::jammer(model.powers(), n_jam, s.power_budget);
    auto value = [&](std::span<const double> z) { return -model.objective(z); };
    auto value_grad = [&](std::span<const double> z, std::span<double> g) {
        const double f = model.value_and_gradient(z, g);
        for (auto& v : g) v = -v;
        return -f;
    };
    bool found = false;
    const std::vector<double> uniform(static_cast<std::size_t>(n), static_cast<double>(n_jam) / n);
    auto x0 = solver_detail::finite_start(value, uniform, set, o, found);
    if (!found) throw InformationInfeasibleError("anchor-side CRLB is infinite for every tried jammer selection");
    auto rep = solver_detail::to_report(solver_detail::projected_gradient(value, value_grad, std::move(x0), set, o), set);
    rep.objective = -rep.objective;
    return rep;
}

/// Continuous power allocation: maximize f~ over {0 <= q <= peak, sum q <= budget}.
inline SolverReport solve_relaxed_power(const Scenario& s, std::span<const double> peak, double budget,
                                        const SolverOptions& o = {}) {
    const JamModel model(s);
    const auto n = static_cast<std::size_t>(model.candidate_count());
    if (peak.size() != n)
        throw DomainError("peak power vector length " + std::to_string(peak.size()) + " != candidate count " +
                          std::to_string(n));
    for (double p : peak)
        if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("peak powers must be finite and nonnegative");
    if (!(budget >= 0.0)) throw DomainError("power budget must be nonnegative");
    const auto set = FeasibleSet::power(peak, budget);
    auto value = [&](std::span<const double> q) { return -model.objective_power(q); };
    auto value_grad = [&](std::span<const double> q, std::span<double> g) {
        const double f = model.value_and_power_gradient(q, g);
        for (auto& v : g) v = -v;
        return -f;
    };
    double total_peak = 0.0;
    for (double p : peak) total_peak += p;
    const double scale = total_peak > budget ? budget / total_peak : 1.0;
    std::vector<double> q0(n);
    for (std::size_t k = 0; k < n; ++k) q0[k] = peak[k] * scale;
    q0 = project_polytope(q0, set, o.projection);
    if (!std::isfinite(value(q0))) throw InformationInfeasibleError("anchor-side CRLB is infinite");
    auto rep = solver_detail::to_report(solver_detail::projected_gradient(value, value_grad, std::move(q0), set, o), set);
    rep.objective = -rep.objective;
    return rep;
}

/// Relaxed joint selection: maximize f~(z^J) subject to f(z^E) <= rho and the
/// joint polytope. When n_eav + n_jam = N the eavesdroppers take every
/// position not jammed (z^E = 1 - z^J) and only z^J is optimized.
inline SolverReport solve_relaxed_joint(const Scenario& s, int n_eav, int n_jam, double rho,
                                        const SolverOptions& o = {}) {
    const EavModel eav(s);
    const JamModel jam(s);
    const int n = eav.candidate_count();
    solver_detail::check_count(n_eav, n, "n_eav");
    solver_detail::check_count(n_jam, n, "n_jam");
    if (n_eav + n_jam > n)
        throw InfeasibleError("n_eav + n_jam = " + std::to_string(n_eav + n_jam) + " exceeds N = " + std::to_string(n));
    if (!(rho > 0.0)) throw DomainError("rho must be positive");
    const auto un = static_cast<std::size_t>(n);
    const bool substitute = n_eav + n_jam == n;

    SolverReport rep;
    if (std::isinf(rho)) {
        rep = solve_relaxed_jam(s, n_jam, o);
        std::vector<double> cap(un), uniform(un, static_cast<double>(n_eav) / n);
        for (std::size_t k = 0; k < un; ++k) cap[k] = std::max(0.0, 1.0 - rep.z[k]);
        rep.z_eav = project_box_sum(uniform, cap, n_eav);
        rep.eav_objective = eav.objective_fim(rep.z_eav);
        rep.residual = FeasibleSet::joint(jam.powers(), n_eav, n_jam, s.power_budget).residual([&] {
            std::vector<double> x(rep.z_eav);
            x.insert(x.end(), rep.z.begin(), rep.z.end());
            return x;
        }());
        return rep;
    }

    // Variables: z^J alone (substitution) or [z^E, z^J].
    const FeasibleSet set = substitute ? FeasibleSet::jammer(jam.powers(), n_jam, s.power_budget)
                                       : FeasibleSet::joint(jam.powers(), n_eav, n_jam, s.power_budget);
    auto split = [&](std::span<const double> x, std::vector<double>& ze, std::vector<double>& zj) {
        if (substitute) {
            zj.assign(x.begin(), x.end());
            ze.resize(un);
            for (std::size_t k = 0; k < un; ++k) ze[k] = std::clamp(1.0 - x[k], 0.0, 1.0);
        } else {
            ze.assign(x.begin(), x.begin() + n);
            zj.assign(x.begin() + n, x.end());
        }
    };
    // d f(z^E) / dx, mapped through the substitution when active.
    auto eav_value_grad = [&](std::span<const double> x, std::span<double> g) {
        std::vector<double> ze, zj, ge(un);
        split(x, ze, zj);
        const double f = eav.value_and_gradient(ze, ge);
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t k = 0; k < un; ++k) {
            if (substitute)
                g[k] = -ge[k];
            else
                g[k] = ge[k];
        }
        return f;
    };
    auto eav_value = [&](std::span<const double> x) {
        std::vector<double> ze, zj;
        split(x, ze, zj);
        return eav.objective_fim(ze);
    };

    // Phase 1: minimize f(z^E) to find a strictly feasible start.
    bool found = false;
    std::vector<double> uniform;
    if (substitute) {
        uniform.assign(un, static_cast<double>(n_jam) / n);
    } else {
        uniform.assign(un, static_cast<double>(n_eav) / n);
        uniform.insert(uniform.end(), un, static_cast<double>(n_jam) / n);
    }
    auto x = solver_detail::finite_start(eav_value, uniform, set, o, found);
    if (!found) throw RhoInfeasibleError("eavesdropper objective is infinite at every tried relaxed point");
    int iterations = 0;
    if (!(eav_value(x) < rho)) {
        auto p1 = solver_detail::projected_gradient(eav_value, eav_value_grad, x, set, o);
        iterations += p1.iterations;
        if (!(p1.value < rho))
            throw RhoInfeasibleError("smallest relaxed eavesdropper objective " + std::to_string(p1.value) +
                                     " is not below rho = " + std::to_string(rho));
        x = std::move(p1.x);
    }

    // Phase 2: barrier stages, maximize f~(z^J) + t log(rho - f(z^E)).
    solver_detail::PgResult stage;
    for (double t = o.barrier_start; t >= o.barrier_end * (1.0 - 1e-9); t *= o.barrier_factor) {
        auto value = [&](std::span<const double> y) {
            const double fe = eav_value(y);
            if (!(fe < rho)) return kInf;
            std::vector<double> ze, zj;
            split(y, ze, zj);
            const double fj = jam.objective(zj);
            if (!std::isfinite(fj)) return kInf;
            return -fj - t * std::log(rho - fe);
        };
        auto value_grad = [&](std::span<const double> y, std::span<double> g) {
            std::vector<double> ge(y.size());
            const double fe = eav_value_grad(y, ge);
            std::vector<double> ze, zj, gj(un);
            split(y, ze, zj);
            const double fj = jam.value_and_gradient(zj, gj);
            const double slack = rho - fe;
            const std::size_t off = substitute ? 0 : un;
            for (std::size_t k = 0; k < y.size(); ++k) g[k] = t * ge[k] / slack;
            for (std::size_t k = 0; k < un; ++k) g[off + k] -= gj[k];
            return -fj - t * std::log(slack);
        };
        stage = solver_detail::projected_gradient(value, value_grad, x, set, o);
        iterations += stage.iterations;
        x = stage.x;
    }
    std::vector<double> ze, zj;
    split(x, ze, zj);
    rep.z = zj;
    rep.z_eav = ze;
    rep.objective = jam.objective(zj);
    rep.eav_objective = eav.objective_fim(ze);
    rep.iterations = iterations;
    rep.step = stage.step;
    rep.relative_change = stage.relative_change;
    rep.converged = stage.converged;
    rep.residual = set.residual(x);
    return rep;
}

}  // namespace locsec
