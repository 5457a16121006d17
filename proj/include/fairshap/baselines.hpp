#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fairshap/dataset.hpp"
#include "fairshap/matrix.hpp"

namespace fairshap {

// Residualizes every encoded column against the centred sensitive attribute.
// The downstream model is trained without direct access to the sensitive
// input (the transform consumes it), mirroring how this preprocessor is used
// in practice; test rows must be transformed too.
class CorrelationRemover {
public:
    static CorrelationRemover fit(const Matrix& X, const std::vector<int>& a, double alpha);
    Matrix transform(const Matrix& X, const std::vector<int>& a) const;

    double alpha() const { return alpha_; }
    const std::vector<double>& beta() const { return beta_; }
    static constexpr bool uses_direct_sensitive = false;
    static constexpr bool test_adjustment_necessity = true;

private:
    std::vector<double> beta_;  // per encoded column
    double a_mean_ = 0.0;
    double alpha_ = 1.0;
};

// Moves each group's numeric values toward the pooled quantile distribution
// (full repair at level 1). Categorical blocks pass through untouched; the
// downstream model keeps the sensitive attribute as an input.
class DisparateImpactRemover {
public:
    static DisparateImpactRemover fit(const Matrix& X, const std::vector<int>& a,
                                      std::span<const RawBlock> blocks,
                                      double repair_level);
    Matrix transform(const Matrix& X, const std::vector<int>& a) const;

    double repair_level() const { return repair_level_; }
    static constexpr bool uses_direct_sensitive = true;
    static constexpr bool test_adjustment_necessity = true;

private:
    struct ColumnRepair {
        std::size_t column = 0;
        std::vector<double> sorted_group[2];  // fit-set values per group
        std::vector<double> sorted_pooled;
    };
    std::vector<ColumnRepair> repairs_;
    double repair_level_ = 1.0;
};

// Replaces n_mods uniformly drawn (row, raw feature) cells with the same
// feature's value from another uniformly drawn row. effective_changes counts
// draws that actually changed the cell.
Matrix ablation_random(const Matrix& X, std::span<const RawBlock> blocks,
                       std::size_t n_mods, std::uint64_t seed,
                       std::size_t* effective_changes = nullptr);

// Replaces n_mods uniformly drawn cells with the nearest-neighbour matched
// reference values (both directions), i.e. matched replacement without the
// attribution-based cell selection.
Matrix ablation_match_random(const Matrix& X, const std::vector<int>& a,
                             std::span<const RawBlock> blocks, std::size_t n_mods,
                             std::uint64_t seed,
                             std::size_t* effective_changes = nullptr);

}  // namespace fairshap
