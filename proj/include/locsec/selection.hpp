#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "locsec/error.hpp"

namespace locsec {

enum class SelectionMode { binary, relaxed };

/// Selection weights over the N candidate positions: 0/1 entries in binary
/// mode, entries in [0, 1] in relaxed mode.
class SelectionVector {
public:
    SelectionVector() = default;

    SelectionVector(std::vector<double> weights, SelectionMode mode)
        : weights_(std::move(weights)), mode_(mode) {
        for (std::size_t k = 0; k < weights_.size(); ++k) {
            const double w = weights_[k];
            const bool ok = mode_ == SelectionMode::binary ? (w == 0.0 || w == 1.0) : (w >= 0.0 && w <= 1.0);
            if (!ok)
                throw DomainError("selection weight " + std::to_string(k) + " = " + std::to_string(w) +
                                  (mode_ == SelectionMode::binary ? " is not 0/1" : " is outside [0, 1]"));
        }
    }

    static SelectionVector binary(std::vector<double> weights) {
        return {std::move(weights), SelectionMode::binary};
    }
    static SelectionVector relaxed(std::vector<double> weights) {
        return {std::move(weights), SelectionMode::relaxed};
    }

    /// Binary vector of length n with ones at `indices`.
    static SelectionVector from_indices(int n, std::span<const int> indices) {
        std::vector<double> w(static_cast<std::size_t>(n), 0.0);
        for (int k : indices) {
            if (k < 0 || k >= n) throw DomainError("selection index " + std::to_string(k) + " out of range");
            w[static_cast<std::size_t>(k)] = 1.0;
        }
        return binary(std::move(w));
    }

    std::span<const double> weights() const { return weights_; }
    SelectionMode mode() const { return mode_; }
    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t k) const { return weights_[k]; }

    std::vector<int> indices() const {
        std::vector<int> out;
        for (std::size_t k = 0; k < weights_.size(); ++k)
            if (weights_[k] != 0.0) out.push_back(static_cast<int>(k));
        return out;
    }

    operator std::span<const double>() const { return weights_; }

    friend bool operator==(const SelectionVector&, const SelectionVector&) = default;

private:
    std::vector<double> weights_;
    SelectionMode mode_ = SelectionMode::relaxed;
};

inline std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

}  // namespace locsec
