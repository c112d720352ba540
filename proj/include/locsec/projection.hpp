#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "locsec/error.hpp"

namespace locsec {

/// Euclidean projection onto {x : 0 <= x <= upper, sum x = total} by water
/// filling: x_k = clip(v_k + tau, 0, upper_k), tau bisected and then solved
/// exactly on the resulting free set.
inline std::vector<double> project_box_sum(std::span<const double> v, std::span<const double> upper,
                                           double total) {
    const std::size_t n = v.size();
    const double cap = std::accumulate(upper.begin(), upper.end(), 0.0);
    if (!(total >= 0.0) || total > cap * (1.0 + 1e-15) + 1e-15)
        throw InfeasibleError("sum " + std::to_string(total) + " outside [0, " + std::to_string(cap) + "]");
    std::vector<double> x(n);
    auto fill = [&](double tau) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) sum += x[k] = std::clamp(v[k] + tau, 0.0, upper[k]);
        return sum;
    };
    if (n == 0) return x;
    double lo = -*std::max_element(v.begin(), v.end());
    double hi = lo;
    for (std::size_t k = 0; k < n; ++k) hi = std::max(hi, upper[k] - v[k]);
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (fill(mid) < total)
            lo = mid;
        else
            hi = mid;
    }
    double tau = 0.5 * (lo + hi);
    fill(tau);
    // Exact tau on the free set found by bisection.
    double fixed = 0.0;
    double free_v = 0.0;
    std::size_t free_count = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (x[k] > 0.0 && x[k] < upper[k]) {
            free_v += v[k];
            ++free_count;
        } else {
            fixed += x[k];
        }
    }
    if (free_count > 0) {
        const double exact = (total - fixed - free_v) / static_cast<double>(free_count);
        bool consistent = true;
        for (std::size_t k = 0; k < n && consistent; ++k) {
            if (x[k] > 0.0 && x[k] < upper[k]) {
                const double y = v[k] + exact;
                consistent = y >= 0.0 && y <= upper[k];
            }
        }
        if (consistent) {
            for (std::size_t k = 0; k < n; ++k)
                if (x[k] > 0.0 && x[k] < upper[k]) x[k] = v[k] + exact;
        }
    }
    return x;
}

/// Projection onto the capped simplex {z : 0 <= z <= 1, sum z = m}.
inline std::vector<double> project_capped_simplex(std::span<const double> v, double m) {
    if (!(m >= 0.0) || m > static_cast<double>(v.size()))
        throw InfeasibleError("capped simplex total " + std::to_string(m) + " outside [0, " +
                              std::to_string(v.size()) + "]");
    const std::vector<double> upper(v.size(), 1.0);
    return project_box_sum(v, upper, m);
}

/// Projection onto {x : 0 <= x <= upper, sum x <= total}.
inline std::vector<double> project_box_sum_at_most(std::span<const double> v, std::span<const double> upper,
                                                   double total) {
    std::vector<double> x(v.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) sum += x[k] = std::clamp(v[k], 0.0, upper[k]);
    if (sum <= total) return x;
    return project_box_sum(v, upper, total);
}

/// One block of variables: 0 <= x <= upper with sum x == total (or <= total).
struct BoxSumBlock {
    std::vector<double> upper;
    double total = 0.0;
    bool equality = true;
};

/// coeff . x_block <= bound.
struct LinearBudget {
    int block = 0;
    std::vector<double> coeff;
    double bound = 0.0;
};

/// Relaxed feasible region of the selection problems: a product of box-sum
/// blocks, optional linear budgets, and (with two blocks) the per-position
/// coupling x0_k + x1_k <= 1.
struct FeasibleSet {
    std::vector<BoxSumBlock> blocks;
    std::vector<LinearBudget> budgets;
    bool coupling = false;

    /// {z in [0,1]^n : sum z = m}.
    static FeasibleSet capped_simplex(int n, double m) {
        FeasibleSet f;
        f.blocks.push_back({std::vector<double>(static_cast<std::size_t>(n), 1.0), m, true});
        f.check_nonempty();
        return f;
    }

    /// Capped simplex plus the jammer power budget sum z_k P_k <= budget.
    static FeasibleSet jammer(std::span<const double> powers, double m, double budget) {
        FeasibleSet f;
        const auto n = powers.size();
        f.blocks.push_back({std::vector<double>(n, 1.0), m, true});
        if (std::isfinite(budget)) f.budgets.push_back({0, {powers.begin(), powers.end()}, budget});
        f.check_nonempty();
        return f;
    }

    /// {0 <= q <= peak, sum q <= budget}.
    static FeasibleSet power(std::span<const double> peak, double budget) {
        FeasibleSet f;
        f.blocks.push_back({{peak.begin(), peak.end()}, budget, false});
        f.check_nonempty();
        return f;
    }

    /// Block 0 = z^E, block 1 = z^J, with coupling and the budget on z^J.
    static FeasibleSet joint(std::span<const double> powers, double n_eav, double n_jam, double budget) {
        FeasibleSet f;
        const auto n = powers.size();
        f.blocks.push_back({std::vector<double>(n, 1.0), n_eav, true});
        f.blocks.push_back({std::vector<double>(n, 1.0), n_jam, true});
        if (std::isfinite(budget)) f.budgets.push_back({1, {powers.begin(), powers.end()}, budget});
        f.coupling = true;
        f.check_nonempty();
        return f;
    }

    int block_size() const { return blocks.empty() ? 0 : static_cast<int>(blocks.front().upper.size()); }
    int dimension() const { return block_size() * static_cast<int>(blocks.size()); }

    void check_nonempty() const {
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const auto& blk = blocks[b];
            if (blk.upper.size() != static_cast<std::size_t>(block_size()))
                throw DomainError("all blocks must have the same length");
            for (double u : blk.upper)
                if (!(u >= 0.0)) throw DomainError("block upper bounds must be nonnegative");
            const double cap = std::accumulate(blk.upper.begin(), blk.upper.end(), 0.0);
            if (!(blk.total >= 0.0) || (blk.equality && blk.total > cap))
                throw InfeasibleError("block " + std::to_string(b) + " requires total " +
                                      std::to_string(blk.total) + " outside [0, " + std::to_string(cap) + "]");
        }
        if (coupling) {
            if (blocks.size() != 2) throw DomainError("coupling needs exactly two blocks");
            if (blocks[0].total + blocks[1].total > static_cast<double>(block_size()) + 1e-12)
                throw InfeasibleError("selection counts exceed the number of positions");
        }
        for (const auto& b : budgets) {
            const auto& blk = blocks[static_cast<std::size_t>(b.block)];
            if (!blk.equality) {
                if (b.bound < 0.0) throw InfeasibleError("negative budget");
                continue;
            }
            // Cheapest fill of the block's required total.
            std::vector<std::size_t> order(b.coeff.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) { return b.coeff[l] < b.coeff[r]; });
            double remaining = blk.total;
            double cost = 0.0;
            for (auto k : order) {
                const double take = std::min(remaining, blk.upper[k]);
                cost += take * b.coeff[k];
                remaining -= take;
                if (remaining <= 0.0) break;
            }
            if (cost > b.bound * (1.0 + 1e-12) + 1e-12)
                throw InfeasibleError("budget " + std::to_string(b.bound) + " below the cheapest selection cost " +
                                      std::to_string(cost));
        }
    }

    /// Largest violation of any constraint at x.
    double residual(std::span<const double> x) const {
        const auto n = static_cast<std::size_t>(block_size());
        double r = 0.0;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const auto& blk = blocks[b];
            double sum = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double v = x[b * n + k];
                r = std::max({r, -v, v - blk.upper[k]});
                sum += v;
            }
            r = std::max(r, blk.equality ? std::abs(sum - blk.total) : sum - blk.total);
        }
        for (const auto& bud : budgets) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += bud.coeff[k] * x[static_cast<std::size_t>(bud.block) * n + k];
            r = std::max(r, s - bud.bound);
        }
        if (coupling)
            for (std::size_t k = 0; k < n; ++k) r = std::max(r, x[k] + x[n + k] - 1.0);
        return r;
    }
};

namespace proj_detail {

inline void project_blocks(const FeasibleSet& set, std::vector<double>& x) {
    const auto n = static_cast<std::size_t>(set.block_size());
    for (std::size_t b = 0; b < set.blocks.size(); ++b) {
        const auto& blk = set.blocks[b];
        std::span<const double> v(x.data() + b * n, n);
        const auto p = blk.equality ? project_box_sum(v, blk.upper, blk.total)
                                    : project_box_sum_at_most(v, blk.upper, blk.total);
        std::copy(p.begin(), p.end(), x.begin() + static_cast<std::ptrdiff_t>(b * n));
    }
}

inline void project_budget(const FeasibleSet& set, const LinearBudget& bud, std::vector<double>& x) {
    const auto n = static_cast<std::size_t>(set.block_size());
    const auto off = static_cast<std::size_t>(bud.block) * n;
    double s = 0.0;
    double norm2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        s += bud.coeff[k] * x[off + k];
        norm2 += bud.coeff[k] * bud.coeff[k];
    }
    if (s <= bud.bound || norm2 == 0.0) return;
    const double step = (s - bud.bound) / norm2;
    for (std::size_t k = 0; k < n; ++k) x[off + k] -= step * bud.coeff[k];
}

inline void project_coupling(const FeasibleSet& set, std::vector<double>& x) {
    const auto n = static_cast<std::size_t>(set.block_size());
    for (std::size_t k = 0; k < n; ++k) {
        const double excess = x[k] + x[n + k] - 1.0;
        if (excess > 0.0) {
            x[k] -= 0.5 * excess;
            x[n + k] -= 0.5 * excess;
        }
    }
}

}  // namespace proj_detail

struct ProjectionOptions {
    double move_tolerance = 1e-10;
    int max_sweeps = 10000;
    double residual_tolerance = 1e-8;
};

/// Euclidean projection onto the feasible set by Dykstra's alternating
/// projections over the elementary sets (blocks, each budget, coupling).
/// With blocks only, this is the exact single-step block projection.
inline std::vector<double> project_polytope(std::span<const double> v, const FeasibleSet& set,
                                            const ProjectionOptions& opts = {}) {
    if (v.size() != static_cast<std::size_t>(set.dimension()))
        throw DomainError("point dimension " + std::to_string(v.size()) + " != feasible set dimension " +
                          std::to_string(set.dimension()));
    std::vector<double> x(v.begin(), v.end());
    const std::size_t sets = 1 + set.budgets.size() + (set.coupling ? 1 : 0);
    if (sets == 1) {
        proj_detail::project_blocks(set, x);
        return x;
    }
    auto apply = [&](std::size_t s, std::vector<double>& y) {
        if (s == 0)
            proj_detail::project_blocks(set, y);
        else if (s <= set.budgets.size())
            proj_detail::project_budget(set, set.budgets[s - 1], y);
        else
            proj_detail::project_coupling(set, y);
    };
    // Start from the block projection; if that already satisfies the rest, it is the answer.
    {
        std::vector<double> y = x;
        proj_detail::project_blocks(set, y);
        if (set.residual(y) <= 1e-12) return y;
    }
    std::vector<std::vector<double>> increments(sets, std::vector<double>(x.size(), 0.0));
    std::vector<double> y(x.size());
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        const std::vector<double> before = x;
        for (std::size_t s = 0; s < sets; ++s) {
            for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] + increments[s][k];
            std::vector<double> p = y;
            apply(s, p);
            for (std::size_t k = 0; k < x.size(); ++k) increments[s][k] = y[k] - p[k];
            x = std::move(p);
        }
        double moved = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) moved = std::max(moved, std::abs(x[k] - before[k]));
        if (moved < opts.move_tolerance && set.residual(x) <= opts.residual_tolerance) return x;
    }
    const double r = set.residual(x);
    if (r <= opts.residual_tolerance) return x;
    throw SolverError("projection did not converge, residual " + std::to_string(r));
}

}  // namespace locsec
