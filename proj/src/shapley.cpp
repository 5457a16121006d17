#include "fairshap/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

#include "fairshap/fairness.hpp"

namespace fairshap {

double value_baseline(const Predictor& f, std::span<const double> x, double a,
                      std::span<const double> r, std::uint32_t coalition) {
    if (x.size() != r.size()) throw Error("value_baseline: x and r lengths differ");
    if (x.size() > 25) throw Error("value_baseline: too many positions for a bitmask");
    std::vector<double> c(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
        c[k] = (coalition >> k) & 1u ? x[k] : r[k];
    return f.predict_probability(c, a) - f.predict_probability(r, a);
}

double value_random_baseline(const Predictor& f, std::span<const double> x, double a,
                             const Matrix& refs, std::uint32_t coalition,
                             std::size_t sample_cap, std::uint64_t seed) {
    if (refs.rows() == 0) throw Error("value_random_baseline: empty reference set");
    if (refs.cols() != x.size())
        throw Error("value_random_baseline: reference width mismatch");

    std::vector<std::size_t> rows(refs.rows());
    std::iota(rows.begin(), rows.end(), 0);
    if (refs.rows() > sample_cap) {
        std::mt19937_64 rng(seed);
        std::shuffle(rows.begin(), rows.end(), rng);
        rows.resize(sample_cap);
        std::sort(rows.begin(), rows.end());
    }

    std::vector<double> c(x.size());
    double v = 0.0;
    for (std::size_t idx : rows) {
        const auto r = refs.row(idx);
        for (std::size_t k = 0; k < x.size(); ++k)
            c[k] = (coalition >> k) & 1u ? x[k] : r[k];
        v += f.predict_probability(c, a) - f.predict_probability(r, a);
    }
    return v / static_cast<double>(rows.size());
}

double dr_marginal_term(const Predictor& f, const MatchingPlan& plan,
                        const Matrix& G_other) {
    const std::size_t m = G_other.rows();
    if (plan.plan.cols() != m) throw Error("dr_marginal_term: plan shape mismatch");
    double term = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double mass = 0.0;
        for (std::size_t i = 0; i < plan.plan.rows(); ++i) mass += plan.plan(i, j);
        if (mass <= 0.0) continue;
        term += mass * dr_instance(f, G_other.row(j));
    }
    return term;
}

namespace {

// Conditional expected risk of the coalition composite for target row i.
double dr_conditional_risk(const Predictor& f, const Matrix& G, const Matrix& G_other,
                           const std::vector<double>& cond,
                           std::span<const RawBlock> blocks, std::size_t i,
                           std::uint32_t coalition) {
    const auto x = G.row(i);
    std::vector<double> c(x.size());
    double risk = 0.0;
    for (std::size_t j = 0; j < cond.size(); ++j) {
        if (cond[j] <= 1e-15) continue;
        const auto r = G_other.row(j);
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            const bool in = (coalition >> k) & 1u;
            for (std::size_t col = blocks[k].begin; col < blocks[k].end; ++col)
                c[col] = in ? x[col] : r[col];
        }
        risk += cond[j] * dr_instance(f, c);
    }
    return risk;
}

}  // namespace

double value_dr_game(const Predictor& f, std::size_t i, std::uint32_t coalition,
                     const MatchingPlan& plan, const Matrix& G, const Matrix& G_other,
                     std::span<const RawBlock> blocks) {
    DrGameContext ctx;
    ctx.f = &f;
    ctx.G = &G;
    ctx.G_other = &G_other;
    ctx.plan = &plan;
    ctx.blocks = blocks;
    ctx.marginal_term = dr_marginal_term(f, plan, G_other);
    return make_dr_game(ctx, i).value(coalition);
}

CoalitionGame make_dr_game(const DrGameContext& ctx, std::size_t i,
                           double* reference_term) {
    if (!ctx.f || !ctx.G || !ctx.G_other || !ctx.plan)
        throw Error("make_dr_game: incomplete context");
    if (ctx.blocks.empty()) throw Error("make_dr_game: no raw blocks");
    if (ctx.blocks.size() > 25) throw Error("make_dr_game: too many raw features");
    if (i >= ctx.G->rows()) throw Error("make_dr_game: target row out of range");

    auto cond = conditional_row(*ctx.plan, i);
    if (reference_term)
        *reference_term =
            dr_conditional_risk(*ctx.f, *ctx.G, *ctx.G_other, cond, ctx.blocks, i, 0u);

    const Predictor* f = ctx.f;
    const Matrix* G = ctx.G;
    const Matrix* Go = ctx.G_other;
    const auto blocks = ctx.blocks;
    const double marginal = ctx.marginal_term;
    auto v = [f, G, Go, cond = std::move(cond), blocks, marginal,
              i](std::uint32_t coalition) {
        return dr_conditional_risk(*f, *G, *Go, cond, blocks, i, coalition) - marginal;
    };
    return CoalitionGame(GameKind::dr_game, blocks.size(), std::move(v));
}

ShapleyResult exact_shapley(const CoalitionGame& game, std::size_t max_players) {
    const std::size_t d = game.players();
    if (d > max_players)
        throw Error("exact_shapley: " + std::to_string(d) + " players exceeds the exact limit of " +
                    std::to_string(max_players) + "; use sampled_shapley");

    const std::uint32_t n_masks = 1u << d;
    std::vector<double> v(n_masks);
    for (std::uint32_t mask = 0; mask < n_masks; ++mask) v[mask] = game.value(mask);

    // weight[s] = s! (d-s-1)! / d!
    std::vector<double> weight(d);
    for (std::size_t s = 0; s < d; ++s) {
        double w = 1.0;
        for (std::size_t t = 1; t <= s; ++t) w *= static_cast<double>(t);
        for (std::size_t t = 1; t <= d - s - 1; ++t) w *= static_cast<double>(t);
        for (std::size_t t = 1; t <= d; ++t) w /= static_cast<double>(t);
        weight[s] = w;
    }

    ShapleyResult res;
    res.phi.assign(d, 0.0);
    res.phi0 = v[0];
    for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
        const std::size_t s = static_cast<std::size_t>(std::popcount(mask));
        for (std::size_t k = 0; k < d; ++k) {
            if ((mask >> k) & 1u) continue;
            res.phi[k] += weight[s] * (v[mask | (1u << k)] - v[mask]);
        }
    }
    return res;
}

ShapleyResult sampled_shapley(const CoalitionGame& game, std::size_t n_permutations,
                              std::uint64_t seed) {
    if (n_permutations == 0) throw Error("sampled_shapley: need at least one permutation");
    const std::size_t d = game.players();

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);

    // Per-feature running mean and M2 across permutations (Welford).
    std::vector<double> mean(d, 0.0), m2(d, 0.0);
    for (std::size_t p = 0; p < n_permutations; ++p) {
        std::shuffle(order.begin(), order.end(), rng);
        std::uint32_t mask = 0;
        double prev = game.value(0u);
        for (std::size_t k : order) {
            mask |= 1u << k;
            const double cur = game.value(mask);
            const double delta = cur - prev;
            prev = cur;
            const double d1 = delta - mean[k];
            mean[k] += d1 / static_cast<double>(p + 1);
            m2[k] += d1 * (delta - mean[k]);
        }
    }

    ShapleyResult res;
    res.phi = mean;
    res.phi0 = game.value(0u);
    res.permutations = n_permutations;
    res.se.assign(d, 0.0);
    if (n_permutations > 1)
        for (std::size_t k = 0; k < d; ++k)
            res.se[k] = std::sqrt(m2[k] / static_cast<double>(n_permutations - 1) /
                                  static_cast<double>(n_permutations));
    return res;
}

ShapleyAttribution shapley_matrix(const Predictor& f, const Matrix& G,
                                  const Matrix& G_other, const MatchingPlan& plan,
                                  std::span<const RawBlock> blocks,
                                  const EstimatorConfig& cfg) {
    const std::size_t n = G.rows(), d = blocks.size();
    if (plan.plan.rows() != n || plan.plan.cols() != G_other.rows())
        throw Error("shapley_matrix: plan shape mismatch");

    bool exact = false;
    switch (cfg.mode) {
        case EstimatorConfig::Mode::exact:
            if (d > cfg.exact_limit)
                throw Error("shapley_matrix: exact estimator limited to " +
                            std::to_string(cfg.exact_limit) + " raw features");
            exact = true;
            break;
        case EstimatorConfig::Mode::sampled: exact = false; break;
        case EstimatorConfig::Mode::automatic: exact = d <= cfg.exact_limit; break;
    }

    DrGameContext ctx;
    ctx.f = &f;
    ctx.G = &G;
    ctx.G_other = &G_other;
    ctx.plan = &plan;
    ctx.blocks = blocks;
    ctx.marginal_term = dr_marginal_term(f, plan, G_other);

    ShapleyAttribution attr;
    attr.phi = Matrix(n, d);
    attr.phi0.resize(n);
    attr.estimator = exact ? "exact" : "sampled";
    attr.seed = cfg.seed;
    if (!exact) {
        attr.permutations = cfg.permutations;
        attr.se = Matrix(n, d);
    }

    for (std::size_t i = 0; i < n; ++i) {
        double ref_term = 0.0;
        const CoalitionGame game = make_dr_game(ctx, i, &ref_term);
        const ShapleyResult r = exact
                                    ? exact_shapley(game, cfg.exact_limit)
                                    : sampled_shapley(game, cfg.permutations,
                                                      mix_seed(cfg.seed, i));
        for (std::size_t k = 0; k < d; ++k) {
            attr.phi(i, k) = r.phi[k];
            if (!exact) attr.se(i, k) = r.se[k];
        }
        attr.phi0[i] = ref_term;
    }
    return attr;
}

void export_phi_csv(const ShapleyAttribution& attr, std::span<const RawBlock> blocks,
                    std::ostream& out) {
    out << "row,raw_feature,phi\n";
    char buf[32];
    for (std::size_t i = 0; i < attr.phi.rows(); ++i)
        for (std::size_t k = 0; k < attr.phi.cols(); ++k) {
            snprintf(buf, sizeof buf, "%.17g", attr.phi(i, k));
            out << i << ',' << blocks[k].name << ',' << buf << '\n';
        }
}

}  // namespace fairshap
