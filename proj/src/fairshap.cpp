#include "fairshap/fairshap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace fairshap {

void FairshapConfig::validate() const {
    if (!std::isfinite(threshold)) throw Error("fairshap config: threshold must be finite");
    if (estimator.permutations == 0)
        throw Error("fairshap config: permutations must be positive");
}

namespace {

void sort_log(std::vector<ModEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const ModEntry& a, const ModEntry& b) {
        if (a.phi != b.phi) return a.phi > b.phi;
        if (a.row != b.row) return a.row < b.row;
        return a.raw_feature < b.raw_feature;
    });
}

}  // namespace

ModifyResult fairshap_modify(const Matrix& target, const Matrix& other,
                             const Predictor& f, std::span<const RawBlock> blocks,
                             const FairshapConfig& cfg) {
    cfg.validate();
    if (blocks.empty()) throw Error("fairshap_modify: no raw blocks");

    ModifyResult res;
    if (cfg.matcher == MatchMethod::nearest_neighbour) {
        res.plan = nearest_neighbor_match(target, other);
    } else {
        SinkhornOptions opt = cfg.sinkhorn;
        if (opt.epsilon <= 0.0) opt.epsilon = default_sinkhorn_epsilon(target, other);
        res.plan = sinkhorn_ot_match(target, other, opt);
    }

    res.attribution = shapley_matrix(f, target, other, res.plan, blocks, cfg.estimator);
    res.reference = build_reference(res.plan, other);
    res.modified = target;

    for (std::size_t i = 0; i < target.rows(); ++i) {
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            const double phi = res.attribution.phi(i, k);
            const double score =
                cfg.threshold_mode == ThresholdMode::absolute ? std::abs(phi) : phi;
            if (score < cfg.threshold) continue;

            ModEntry e;
            e.row = i;
            e.raw_feature = k;
            e.phi = phi;
            e.reference_row = res.reference.source_index[i];
            for (std::size_t c = blocks[k].begin; c < blocks[k].end; ++c) {
                e.old_block.push_back(target(i, c));
                e.new_block.push_back(res.reference.rows(i, c));
                res.modified(i, c) = res.reference.rows(i, c);
            }
            res.log.entries.push_back(std::move(e));
        }
    }
    sort_log(res.log.entries);
    return res;
}

AugmentResult fairshap_augment(const Matrix& X, const std::vector<int>& a,
                               const Predictor& f, std::span<const RawBlock> blocks,
                               const FairshapConfig& cfg) {
    const SensitiveSplit split = split_by_sensitive(X, a);

    FairshapConfig cfg0 = cfg;
    if (cfg.matcher == MatchMethod::optimal_transport && cfg.sinkhorn.epsilon <= 0.0) {
        // Resolve the relative default once so both directions share epsilon.
        cfg0.sinkhorn.epsilon = default_sinkhorn_epsilon(split.group_a0, split.group_a1);
    }

    const ModifyResult dir0 = fairshap_modify(split.group_a0, split.group_a1, f, blocks, cfg0);
    const ModifyResult dir1 = fairshap_modify(split.group_a1, split.group_a0, f, blocks, cfg0);

    AugmentResult res;
    res.data = X;
    res.sinkhorn_epsilon = cfg0.sinkhorn.epsilon;
    res.matching_converged = dir0.plan.converged && dir1.plan.converged;
    for (std::size_t i = 0; i < split.index_a0.size(); ++i)
        res.data.set_row(split.index_a0[i], dir0.modified.row(i));
    for (std::size_t i = 0; i < split.index_a1.size(); ++i)
        res.data.set_row(split.index_a1[i], dir1.modified.row(i));

    for (const ModEntry& e : dir0.log.entries) {
        ModEntry g = e;
        g.row = split.index_a0[e.row];
        g.reference_row = split.index_a1[e.reference_row];
        res.log.entries.push_back(std::move(g));
        ++res.log.from_group0;
    }
    for (const ModEntry& e : dir1.log.entries) {
        ModEntry g = e;
        g.row = split.index_a1[e.row];
        g.reference_row = split.index_a0[e.reference_row];
        res.log.entries.push_back(std::move(g));
        ++res.log.from_group1;
    }
    sort_log(res.log.entries);
    return res;
}

ReplacementIdentityStats replacement_identity_stats(const Matrix& X_before,
                                                    const Matrix& X_after,
                                                    const ModificationLog& log,
                                                    const Predictor& f,
                                                    std::span<const RawBlock> blocks) {
    ReplacementIdentityStats st;
    std::vector<std::size_t> count(X_before.rows(), 0);
    std::vector<double> phi_sum(X_before.rows(), 0.0);
    for (const ModEntry& e : log.entries) {
        if (e.row >= X_before.rows())
            throw Error("replacement_identity_stats: log row out of range");
        count[e.row] += 1;
        phi_sum[e.row] += e.phi;
    }

    for (std::size_t r = 0; r < X_before.rows(); ++r) {
        if (count[r] == 0) continue;
        const double before = dr_instance(f, X_before.row(r));
        const double after = dr_instance(f, X_after.row(r));
        const double gap = std::abs((before - after) - phi_sum[r]);
        st.instances += 1;
        st.mean_abs_gap += gap;
        st.max_abs_gap = std::max(st.max_abs_gap, gap);
        if (count[r] == blocks.size()) {
            st.grand_coalition_instances += 1;
            st.max_grand_coalition_gap = std::max(st.max_grand_coalition_gap, gap);
        }
    }
    if (st.instances > 0) st.mean_abs_gap /= static_cast<double>(st.instances);
    return st;
}

std::vector<SweepPoint> modification_sweep(
    const Matrix& X_train, const std::vector<int>& a_train, const std::vector<int>& y_train,
    const Matrix& X_test, const std::vector<int>& a_test, const std::vector<int>& y_test,
    std::span<const RawBlock> blocks, const Predictor& baseline,
    const TrainConfig& train_cfg, const FairshapConfig& cfg, std::size_t n_points) {
    if (n_points < 2) throw Error("modification_sweep: need at least 2 points");

    const AugmentResult aug = fairshap_augment(X_train, a_train, baseline, blocks, cfg);
    const std::size_t total = aug.log.entries.size();

    // Point p covers round(p/(n_points-1) * total) entries; duplicates are kept
    // so that curves from different folds align point-by-point.
    std::vector<std::size_t> sizes;
    for (std::size_t p = 0; p < n_points; ++p)
        sizes.push_back(static_cast<std::size_t>(
            std::llround(static_cast<double>(p) * static_cast<double>(total) /
                         static_cast<double>(n_points - 1))));

    std::vector<SweepPoint> out;
    double dr0 = 0.0;
    for (std::size_t s : sizes) {
        Matrix X_mod = X_train;
        for (std::size_t e = 0; e < s; ++e) {
            const ModEntry& me = aug.log.entries[e];
            const RawBlock& blk = blocks[me.raw_feature];
            for (std::size_t c = blk.begin; c < blk.end; ++c)
                X_mod(me.row, c) = me.new_block[c - blk.begin];
        }
        const auto model = train_model(X_mod, a_train, y_train, train_cfg);

        SweepPoint pt;
        pt.n_modifications = s;
        pt.accuracy = accuracy(*model, X_test, a_test, y_test);
        pt.dr = dr_dataset(*model, X_test);
        pt.dp = demographic_parity(*model, X_test, a_test);
        pt.eo = equality_of_opportunity(*model, X_test, a_test, y_test);
        try {
            pt.pqp = predictive_quality_parity(*model, X_test, a_test, y_test);
        } catch (const MetricUndefined&) {
            pt.pqp.reset();
        }
        if (out.empty()) dr0 = pt.dr;
        pt.dr_reduction_pct = dr0 > 0.0 ? 100.0 * (dr0 - pt.dr) / dr0 : 0.0;
        out.push_back(pt);
    }
    return out;
}

void export_log_csv(const ModificationLog& log, std::span<const RawBlock> blocks,
                    std::ostream& out) {
    out << "row,raw_feature,phi,reference_row\n";
    char buf[32];
    for (const ModEntry& e : log.entries) {
        snprintf(buf, sizeof buf, "%.17g", e.phi);
        out << e.row << ',' << blocks[e.raw_feature].name << ',' << buf << ','
            << e.reference_row << '\n';
    }
}

}  // namespace fairshap
