#include "fairshap/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fairshap/matching.hpp"

namespace fairshap {

CorrelationRemover CorrelationRemover::fit(const Matrix& X, const std::vector<int>& a,
                                           double alpha) {
    if (X.rows() == 0) throw Error("correlation_remover: empty matrix");
    if (a.size() != X.rows()) throw Error("correlation_remover: sensitive length mismatch");
    if (alpha < 0.0 || alpha > 1.0)
        throw Error("correlation_remover: alpha must be in [0, 1]");

    CorrelationRemover cr;
    cr.alpha_ = alpha;
    const std::size_t n = X.rows();
    double am = 0.0;
    for (int v : a) am += v;
    am /= static_cast<double>(n);
    cr.a_mean_ = am;

    double a_var = 0.0;
    for (int v : a) a_var += (v - am) * (v - am);
    cr.beta_.assign(X.cols(), 0.0);
    if (a_var <= 0.0) return cr;  // constant sensitive column: nothing to remove

    for (std::size_t c = 0; c < X.cols(); ++c) {
        double cov = 0.0;
        for (std::size_t r = 0; r < n; ++r) cov += X(r, c) * (a[r] - am);
        cr.beta_[c] = cov / a_var;
    }
    return cr;
}

Matrix CorrelationRemover::transform(const Matrix& X, const std::vector<int>& a) const {
    if (a.size() != X.rows()) throw Error("correlation_remover: sensitive length mismatch");
    if (X.cols() != beta_.size()) throw Error("correlation_remover: width mismatch");
    Matrix out = X;
    for (std::size_t r = 0; r < X.rows(); ++r) {
        const double centred = a[r] - a_mean_;
        for (std::size_t c = 0; c < X.cols(); ++c)
            out(r, c) -= alpha_ * beta_[c] * centred;
    }
    return out;
}

namespace {

// Inverse empirical CDF, lowest-value convention: smallest v with F(v) >= q.
double quantile_type1(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    const double pos = q * static_cast<double>(n);
    std::size_t idx = static_cast<std::size_t>(std::ceil(pos));
    if (idx > 0) --idx;
    if (idx >= n) idx = n - 1;
    return sorted[idx];
}

// Mid-rank empirical CDF position of v within its group's fit values.
double midrank_cdf(const std::vector<double>& sorted, double v) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), v);
    const auto hi = std::upper_bound(sorted.begin(), sorted.end(), v);
    const double below = static_cast<double>(lo - sorted.begin());
    const double equal = static_cast<double>(hi - lo);
    return (below + 0.5 * std::max(equal, 1.0)) / static_cast<double>(sorted.size());
}

}  // namespace

DisparateImpactRemover DisparateImpactRemover::fit(const Matrix& X,
                                                   const std::vector<int>& a,
                                                   std::span<const RawBlock> blocks,
                                                   double repair_level) {
    if (X.rows() == 0) throw Error("disparate_impact_remover: empty matrix");
    if (a.size() != X.rows())
        throw Error("disparate_impact_remover: sensitive length mismatch");
    if (repair_level < 0.0 || repair_level > 1.0)
        throw Error("disparate_impact_remover: repair_level must be in [0, 1]");
    const bool g0 = std::count(a.begin(), a.end(), 0) > 0;
    const bool g1 = std::count(a.begin(), a.end(), 1) > 0;
    if (!g0 || !g1) throw Error("disparate_impact_remover: one sensitive group is empty");

    DisparateImpactRemover dir;
    dir.repair_level_ = repair_level;
    for (const RawBlock& blk : blocks) {
        if (blk.kind != FeatureKind::numeric) continue;
        ColumnRepair rep;
        rep.column = blk.begin;
        for (std::size_t r = 0; r < X.rows(); ++r) {
            rep.sorted_group[a[r] ? 1 : 0].push_back(X(r, rep.column));
            rep.sorted_pooled.push_back(X(r, rep.column));
        }
        std::sort(rep.sorted_group[0].begin(), rep.sorted_group[0].end());
        std::sort(rep.sorted_group[1].begin(), rep.sorted_group[1].end());
        std::sort(rep.sorted_pooled.begin(), rep.sorted_pooled.end());
        dir.repairs_.push_back(std::move(rep));
    }
    return dir;
}

Matrix DisparateImpactRemover::transform(const Matrix& X, const std::vector<int>& a) const {
    if (a.size() != X.rows())
        throw Error("disparate_impact_remover: sensitive length mismatch");
    Matrix out = X;
    for (const ColumnRepair& rep : repairs_) {
        if (rep.column >= X.cols())
            throw Error("disparate_impact_remover: width mismatch");
        for (std::size_t r = 0; r < X.rows(); ++r) {
            const auto& grp = rep.sorted_group[a[r] ? 1 : 0];
            const double q = midrank_cdf(grp, X(r, rep.column));
            const double target = quantile_type1(rep.sorted_pooled, q);
            out(r, rep.column) =
                (1.0 - repair_level_) * X(r, rep.column) + repair_level_ * target;
        }
    }
    return out;
}

Matrix ablation_random(const Matrix& X, std::span<const RawBlock> blocks,
                       std::size_t n_mods, std::uint64_t seed,
                       std::size_t* effective_changes) {
    if (X.rows() == 0 || blocks.empty()) throw Error("ablation_random: empty input");
    Matrix out = X;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> row_d(0, X.rows() - 1);
    std::uniform_int_distribution<std::size_t> feat_d(0, blocks.size() - 1);
    std::size_t changed = 0;
    for (std::size_t t = 0; t < n_mods; ++t) {
        const std::size_t r = row_d(rng);
        const std::size_t k = feat_d(rng);
        const std::size_t src = row_d(rng);
        bool diff = false;
        for (std::size_t c = blocks[k].begin; c < blocks[k].end; ++c) {
            if (out(r, c) != X(src, c)) diff = true;
            out(r, c) = X(src, c);
        }
        if (diff) ++changed;
    }
    if (effective_changes) *effective_changes = changed;
    return out;
}

Matrix ablation_match_random(const Matrix& X, const std::vector<int>& a,
                             std::span<const RawBlock> blocks, std::size_t n_mods,
                             std::uint64_t seed, std::size_t* effective_changes) {
    if (X.rows() == 0 || blocks.empty()) throw Error("ablation_match_random: empty input");
    const SensitiveSplit split = split_by_sensitive(X, a);
    const MatchingPlan plan0 = nearest_neighbor_match(split.group_a0, split.group_a1);
    const MatchingPlan plan1 = nearest_neighbor_match(split.group_a1, split.group_a0);
    const ReferenceSet ref0 = build_reference(plan0, split.group_a1);
    const ReferenceSet ref1 = build_reference(plan1, split.group_a0);

    // Reference row (in X coordinates) for every row of X.
    std::vector<std::size_t> ref_of(X.rows());
    for (std::size_t i = 0; i < split.index_a0.size(); ++i)
        ref_of[split.index_a0[i]] = split.index_a1[ref0.source_index[i]];
    for (std::size_t i = 0; i < split.index_a1.size(); ++i)
        ref_of[split.index_a1[i]] = split.index_a0[ref1.source_index[i]];

    Matrix out = X;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> row_d(0, X.rows() - 1);
    std::uniform_int_distribution<std::size_t> feat_d(0, blocks.size() - 1);
    std::size_t changed = 0;
    for (std::size_t t = 0; t < n_mods; ++t) {
        const std::size_t r = row_d(rng);
        const std::size_t k = feat_d(rng);
        const std::size_t src = ref_of[r];
        bool diff = false;
        for (std::size_t c = blocks[k].begin; c < blocks[k].end; ++c) {
            if (out(r, c) != X(src, c)) diff = true;
            out(r, c) = X(src, c);
        }
        if (diff) ++changed;
    }
    if (effective_changes) *effective_changes = changed;
    return out;
}

}  // namespace fairshap
