#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fairshap/harness.hpp"
#include "fairshap/shapley.hpp"
#include "fairshap/synth.hpp"

namespace fairshap {

namespace {

std::vector<RawBlock> unit_blocks(std::size_t d) {
    std::vector<RawBlock> blocks(d);
    for (std::size_t k = 0; k < d; ++k) {
        blocks[k].name = "f" + std::to_string(k);
        blocks[k].kind = FeatureKind::numeric;
        blocks[k].begin = k;
        blocks[k].end = k + 1;
    }
    return blocks;
}

Matrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t d, double shift) {
    std::normal_distribution<double> norm(0.0, 1.0);
    Matrix m(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = norm(rng) + shift;
    return m;
}

std::string game_tag(std::uint64_t seed, std::size_t index) {
    std::ostringstream ss;
    ss << "seed=" << seed << " case=" << index;
    return ss.str();
}

SuiteResult suite_shapley_axioms(std::uint64_t seed, std::size_t count,
                                 SuiteCorruption corruption) {
    SuiteResult res;
    res.name = "shapley_axioms";
    double worst_eff = 0.0, worst_sym = 0.0, worst_dummy = 0.0;

    for (std::size_t g = 0; g < count; ++g) {
        std::mt19937_64 rng(mix_seed(seed, g));
        // d >= 3 keeps the designated dummy and the symmetric pair disjoint
        std::uniform_int_distribution<std::size_t> d_dist(3, 8), n_dist(3, 10);
        std::normal_distribution<double> norm(0.0, 1.0);
        const std::size_t d = d_dist(rng);
        const std::size_t n0 = n_dist(rng), n1 = n_dist(rng);

        Matrix G0 = random_matrix(rng, n0, d, 0.0);
        Matrix G1 = random_matrix(rng, n1, d, 0.4);

        std::vector<double> w(d);
        for (auto& v : w) v = 1.5 * norm(rng);
        const double w_a = 0.5 + std::abs(norm(rng));
        const double bias = 0.5 * norm(rng);

        // Dummy player: the model ignores feature `dummy`. Symmetric pair:
        // equal weights and identical columns.
        const std::size_t dummy = d - 1;
        w[dummy] = 0.0;
        const std::size_t sym_a = 0, sym_b = 1;
        w[sym_b] = w[sym_a];
        for (std::size_t i = 0; i < n0; ++i) G0(i, sym_b) = G0(i, sym_a);
        for (std::size_t i = 0; i < n1; ++i) G1(i, sym_b) = G1(i, sym_a);

        const auto f = make_logistic_predictor(w, w_a, bias);
        const auto blocks = unit_blocks(d);
        const MatchingPlan plan = nearest_neighbor_match(G0, G1);
        EstimatorConfig est;
        est.mode = EstimatorConfig::Mode::exact;
        const ShapleyAttribution attr = shapley_matrix(*f, G0, G1, plan, blocks, est);

        double eff = 0.0, dum = 0.0, sym = 0.0;
        for (std::size_t i = 0; i < n0; ++i) {
            double total = attr.phi0[i];
            for (std::size_t k = 0; k < d; ++k) total += attr.phi(i, k);
            double lhs = dr_instance(*f, G0.row(i));
            if (corruption == SuiteCorruption::efficiency_offset) lhs += 0.01;
            eff = std::max(eff, std::abs(total - lhs));
            dum = std::max(dum, std::abs(attr.phi(i, dummy)));
            sym = std::max(sym, std::abs(attr.phi(i, sym_a) - attr.phi(i, sym_b)));
        }

        res.checks += 3;
        if (eff > 1e-9) {
            ++res.failures;
            res.counterexamples.push_back(game_tag(seed, g) + " efficiency gap " +
                                          std::to_string(eff));
        }
        if (dum > 1e-12) {
            ++res.failures;
            res.counterexamples.push_back(game_tag(seed, g) + " dummy attribution " +
                                          std::to_string(dum));
        }
        if (sym > 1e-9) {
            ++res.failures;
            res.counterexamples.push_back(game_tag(seed, g) + " symmetry gap " +
                                          std::to_string(sym));
        }
        worst_eff = std::max(worst_eff, eff);
        worst_dummy = std::max(worst_dummy, dum);
        worst_sym = std::max(worst_sym, sym);
    }
    res.stats["max_efficiency_gap"] = worst_eff;
    res.stats["max_dummy_attribution"] = worst_dummy;
    res.stats["max_symmetry_gap"] = worst_sym;
    return res;
}

// Random indicator model over integer-valued columns.
std::unique_ptr<Predictor> random_rule_model(std::mt19937_64& rng, std::size_t d) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> thresholds(d);
    for (auto& t : thresholds) t = 0.5 + std::floor(unif(rng) * 2.0);  // 0.5 or 1.5
    std::vector<std::uint8_t> table(std::size_t{1} << (d + 1));
    for (auto& b : table) b = unif(rng) < 0.5 ? 0 : 1;
    return make_rule_predictor(std::move(thresholds), std::move(table));
}

Matrix random_discrete_matrix(std::mt19937_64& rng, std::size_t n, std::size_t d,
                              const std::vector<double>& level_bias) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix m(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double u = unif(rng);
            const double p0 = level_bias[j % level_bias.size()];
            m(i, j) = u < p0 ? 0.0 : (u < p0 + (1.0 - p0) / 2.0 ? 1.0 : 2.0);
        }
    return m;
}

SuiteResult suite_parity_bound(std::uint64_t seed, std::size_t count, bool with_shift) {
    SuiteResult res;
    res.name = with_shift ? "parity_bound_shift" : "parity_bound";
    double worst_margin = std::numeric_limits<double>::infinity();

    for (std::size_t g = 0; g < count; ++g) {
        std::mt19937_64 rng(mix_seed(seed ^ (with_shift ? 0x5a5a5a5aULL : 0ULL), g));
        std::uniform_int_distribution<std::size_t> d_dist(1, 3), n_dist(3, 12);
        const std::size_t d = d_dist(rng);
        const auto f = random_rule_model(rng, d);

        Matrix X;
        std::vector<int> a;
        double tv = 0.0;
        if (with_shift) {
            const std::size_t n0 = n_dist(rng), n1 = n_dist(rng);
            const Matrix X0 = random_discrete_matrix(rng, n0, d, {0.2, 0.5});
            const Matrix X1 = random_discrete_matrix(rng, n1, d, {0.6, 0.3});
            X = Matrix(n0 + n1, d);
            for (std::size_t i = 0; i < n0; ++i) X.set_row(i, X0.row(i));
            for (std::size_t i = 0; i < n1; ++i) X.set_row(n0 + i, X1.row(i));
            a.assign(n0, 0);
            a.insert(a.end(), n1, 1);
            BinningSpec spec;
            spec.columns.assign(d, ColumnBinning{});
            tv = tv_distance_discrete(X0, X1, spec);
        } else {
            // Identical empirical feature distributions: one shared pool,
            // each row present once per group.
            const std::size_t k = n_dist(rng);
            const Matrix pool = random_discrete_matrix(rng, k, d, {0.3, 0.5});
            X = Matrix(2 * k, d);
            for (std::size_t i = 0; i < k; ++i) {
                X.set_row(i, pool.row(i));
                X.set_row(k + i, pool.row(i));
            }
            a.assign(k, 0);
            a.insert(a.end(), k, 1);
        }

        const double dp = demographic_parity(*f, X, a);
        const double dr = dr_dataset(*f, X, DrMode::label);
        const double bound = dr + tv;
        res.checks += 1;
        if (dp > bound + 1e-12) {
            ++res.failures;
            res.counterexamples.push_back(game_tag(seed, g) + " dp " + std::to_string(dp) +
                                          " exceeds bound " + std::to_string(bound));
        }
        worst_margin = std::min(worst_margin, bound - dp);
    }
    res.stats["min_margin"] = worst_margin;
    return res;
}

SuiteResult suite_replacement_identity(std::uint64_t seed, std::size_t count) {
    SuiteResult res;
    res.name = "replacement_identity";
    double mean_gap = 0.0, max_gap = 0.0, max_grand = 0.0;
    std::size_t measured = 0, grand_cases = 0;

    for (std::size_t g = 0; g < count; ++g) {
        std::mt19937_64 rng(mix_seed(seed + 17, g));
        std::uniform_int_distribution<std::size_t> d_dist(2, 6), n_dist(4, 12);
        std::normal_distribution<double> norm(0.0, 1.0);
        const std::size_t d = d_dist(rng);
        const Matrix G0 = random_matrix(rng, n_dist(rng), d, 0.0);
        const Matrix G1 = random_matrix(rng, n_dist(rng), d, 0.5);

        std::vector<double> w(d);
        for (auto& v : w) v = 1.2 * norm(rng);
        const auto f = make_logistic_predictor(w, 0.8 + std::abs(norm(rng)), 0.2 * norm(rng));
        const auto blocks = unit_blocks(d);

        FairshapConfig cfg;
        cfg.threshold_mode = ThresholdMode::absolute;
        cfg.threshold = (g % 3 == 0) ? 0.0 : (g % 3 == 1 ? 0.01 : 0.03);
        cfg.estimator.mode = EstimatorConfig::Mode::exact;

        const ModifyResult mr = fairshap_modify(G0, G1, *f, blocks, cfg);
        const ReplacementIdentityStats st =
            replacement_identity_stats(G0, mr.modified, mr.log, *f, blocks);

        if (st.instances > 0) {
            mean_gap += st.mean_abs_gap * static_cast<double>(st.instances);
            measured += st.instances;
            max_gap = std::max(max_gap, st.max_abs_gap);
        }
        if (cfg.threshold == 0.0) {
            // |phi| >= 0 selects every cell, so the rewritten rows must equal
            // their references and the risk drop must match the phi total.
            res.checks += 1;
            grand_cases += st.grand_coalition_instances;
            max_grand = std::max(max_grand, st.max_grand_coalition_gap);
            if (st.grand_coalition_instances != G0.rows() ||
                st.max_grand_coalition_gap > 1e-9) {
                ++res.failures;
                res.counterexamples.push_back(game_tag(seed, g) + " grand-coalition gap " +
                                              std::to_string(st.max_grand_coalition_gap));
            }
        }
    }
    res.stats["mean_abs_gap"] = measured ? mean_gap / static_cast<double>(measured) : 0.0;
    res.stats["max_abs_gap"] = max_gap;
    res.stats["max_grand_coalition_gap"] = max_grand;
    res.stats["grand_coalition_instances"] = static_cast<double>(grand_cases);
    return res;
}

}  // namespace

SuiteResult run_property_suite(SuiteKind kind, std::uint64_t seed, std::size_t count,
                               SuiteCorruption corruption) {
    if (count == 0) throw Error("run_property_suite: count must be positive");
    switch (kind) {
        case SuiteKind::shapley_axioms: return suite_shapley_axioms(seed, count, corruption);
        case SuiteKind::parity_bound: return suite_parity_bound(seed, count, false);
        case SuiteKind::parity_bound_shift: return suite_parity_bound(seed, count, true);
        case SuiteKind::replacement_identity: return suite_replacement_identity(seed, count);
    }
    throw Error("run_property_suite: unknown suite");
}

}  // namespace fairshap
