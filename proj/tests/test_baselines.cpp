#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fairshap/baselines.hpp"
#include "fairshap/fairness.hpp"
#include "fairshap/matching.hpp"
#include "oracles.hpp"

using namespace fairshap;

namespace {

std::vector<int> alternating(std::size_t n) {
    std::vector<int> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = i % 2;
    return a;
}

double column_covariance_with(const Matrix& X, const std::vector<int>& a, std::size_t c) {
    const double n = static_cast<double>(X.rows());
    double mx = 0.0, ma = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        mx += X(i, c);
        ma += a[i];
    }
    mx /= n;
    ma /= n;
    double cov = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) cov += (X(i, c) - mx) * (a[i] - ma);
    return cov / n;
}

std::vector<RawBlock> single_blocks(std::size_t d) {
    std::vector<RawBlock> blocks(d);
    for (std::size_t k = 0; k < d; ++k) {
        blocks[k].name = "f" + std::to_string(k);
        blocks[k].begin = k;
        blocks[k].end = k + 1;
    }
    return blocks;
}

}  // namespace

TEST_CASE("full-strength decorrelation leaves no residual covariance") {
    Matrix X = oracles::random_matrix(200, 5, 3);
    const std::vector<int> a = alternating(200);
    // Plant strong correlation in two columns.
    for (std::size_t i = 0; i < X.rows(); ++i) {
        X(i, 0) += 3.0 * a[i];
        X(i, 2) -= 2.0 * a[i];
    }
    const CorrelationRemover cr = CorrelationRemover::fit(X, a, 1.0);
    const Matrix X2 = cr.transform(X, a);
    REQUIRE(cr.beta().size() == 5);
    for (std::size_t c = 0; c < 5; ++c)
        CHECK(std::abs(column_covariance_with(X2, a, c)) <= 1e-9);
}

TEST_CASE("the decorrelation strength interpolates linearly") {
    Matrix X = oracles::random_matrix(100, 2, 7);
    const std::vector<int> a = alternating(100);
    for (std::size_t i = 0; i < X.rows(); ++i) X(i, 1) += 2.0 * a[i];

    const Matrix id = CorrelationRemover::fit(X, a, 0.0).transform(X, a);
    CHECK(id == X);

    const Matrix half = CorrelationRemover::fit(X, a, 0.5).transform(X, a);
    const Matrix full = CorrelationRemover::fit(X, a, 1.0).transform(X, a);
    for (std::size_t i = 0; i < X.rows(); ++i)
        CHECK(half(i, 1) == doctest::Approx(0.5 * (X(i, 1) + full(i, 1))));

    CHECK_THROWS_AS(CorrelationRemover::fit(X, a, 1.5), Error);
    CHECK_THROWS_AS(CorrelationRemover::fit(X, a, -0.1), Error);
    CHECK_THROWS_AS(CorrelationRemover::fit(Matrix(), {}, 1.0), Error);
    const CorrelationRemover cr = CorrelationRemover::fit(X, a, 1.0);
    CHECK_THROWS_AS(cr.transform(oracles::random_matrix(5, 3, 1), std::vector<int>(5, 0)),
                    Error);
}

TEST_CASE("decorrelation applies fit-set coefficients to new rows") {
    Matrix X = oracles::random_matrix(80, 1, 9);
    const std::vector<int> a = alternating(80);
    for (std::size_t i = 0; i < X.rows(); ++i) X(i, 0) += 4.0 * a[i];
    const CorrelationRemover cr = CorrelationRemover::fit(X, a, 1.0);

    // The transform is x - beta * (a - mean_a) with fit-set statistics, so a
    // held-out row moves by exactly that amount.
    const Matrix row = Matrix::from_rows({{10.0}});
    const Matrix t0 = cr.transform(row, {0});
    const Matrix t1 = cr.transform(row, {1});
    CHECK(t0(0, 0) - t1(0, 0) == doctest::Approx(cr.beta()[0]));
    CHECK(t0(0, 0) == doctest::Approx(10.0 - cr.beta()[0] * (0.0 - 0.5)));
}

TEST_CASE("quantile repair maps both groups onto the pooled distribution") {
    // Frozen case: groups {1,2} and {3,4}; pooled {1,2,3,4}. Mid-ranks 0.25
    // and 0.75 pick the first and third pooled values for both groups.
    const Matrix X = Matrix::from_rows({{1.0}, {3.0}, {2.0}, {4.0}});
    const std::vector<int> a = {0, 1, 0, 1};
    const auto blocks = single_blocks(1);
    const DisparateImpactRemover dir = DisparateImpactRemover::fit(X, a, blocks, 1.0);
    const Matrix R = dir.transform(X, a);
    CHECK(R(0, 0) == doctest::Approx(1.0));
    CHECK(R(2, 0) == doctest::Approx(3.0));
    CHECK(R(1, 0) == doctest::Approx(1.0));
    CHECK(R(3, 0) == doctest::Approx(3.0));
}

TEST_CASE("quantile repair preserves within-group order and honours the level") {
    Matrix X = oracles::random_matrix(120, 2, 11);
    const std::vector<int> a = alternating(120);
    for (std::size_t i = 0; i < X.rows(); ++i) X(i, 0) += 2.5 * a[i];
    const auto blocks = single_blocks(2);

    const Matrix id = DisparateImpactRemover::fit(X, a, blocks, 0.0).transform(X, a);
    CHECK(id == X);

    const Matrix full = DisparateImpactRemover::fit(X, a, blocks, 1.0).transform(X, a);
    const Matrix half = DisparateImpactRemover::fit(X, a, blocks, 0.5).transform(X, a);
    for (std::size_t i = 0; i < X.rows(); ++i)
        CHECK(half(i, 0) == doctest::Approx(0.5 * (X(i, 0) + full(i, 0))));

    // Rank order within each group survives the repair.
    for (int g = 0; g <= 1; ++g) {
        std::vector<std::pair<double, double>> vals;  // (original, repaired)
        for (std::size_t i = 0; i < X.rows(); ++i)
            if (a[i] == g) vals.emplace_back(X(i, 0), full(i, 0));
        std::sort(vals.begin(), vals.end());
        for (std::size_t i = 1; i < vals.size(); ++i)
            CHECK(vals[i].second >= vals[i - 1].second - 1e-12);
    }

    // After full repair the group distributions of the repaired column agree.
    std::vector<double> g0, g1;
    for (std::size_t i = 0; i < X.rows(); ++i) (a[i] ? g1 : g0).push_back(full(i, 0));
    CHECK(wasserstein_1d(g0, g1) < 0.12);

    CHECK_THROWS_AS(DisparateImpactRemover::fit(X, a, blocks, 2.0), Error);
    CHECK_THROWS_AS(DisparateImpactRemover::fit(X, std::vector<int>(120, 0), blocks, 1.0),
                    Error);
}

TEST_CASE("quantile repair leaves categorical blocks untouched") {
    Matrix X(40, 3);
    std::vector<int> a = alternating(40);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        X(i, 0) = static_cast<double>(i) + (a[i] ? 10.0 : 0.0);
        X(i, 1) = i % 2 ? 1.0 : -1.0;  // one-hot style pair
        X(i, 2) = i % 2 ? -1.0 : 1.0;
    }
    std::vector<RawBlock> blocks(2);
    blocks[0].name = "num";
    blocks[0].begin = 0;
    blocks[0].end = 1;
    blocks[1].name = "cat";
    blocks[1].kind = FeatureKind::categorical;
    blocks[1].begin = 1;
    blocks[1].end = 3;

    const Matrix R = DisparateImpactRemover::fit(X, a, blocks, 1.0).transform(X, a);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        CHECK(R(i, 1) == X(i, 1));
        CHECK(R(i, 2) == X(i, 2));
    }
    bool numeric_moved = false;
    for (std::size_t i = 0; i < X.rows(); ++i) numeric_moved |= R(i, 0) != X(i, 0);
    CHECK(numeric_moved);
}

TEST_CASE("random ablation draws are seeded, counted and column-consistent") {
    const Matrix X = oracles::random_matrix(60, 4, 13);
    const auto blocks = single_blocks(4);
    std::size_t eff1 = 0, eff2 = 0;
    const Matrix m1 = ablation_random(X, blocks, 50, 21, &eff1);
    const Matrix m2 = ablation_random(X, blocks, 50, 21, &eff2);
    const Matrix m3 = ablation_random(X, blocks, 50, 22);
    CHECK(m1 == m2);
    CHECK(eff1 == eff2);
    CHECK(eff1 <= 50);
    CHECK(eff1 > 0);
    CHECK_FALSE(m1 == m3);

    // Every changed cell holds a value that exists elsewhere in its column.
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t c = 0; c < X.cols(); ++c)
            if (m1(i, c) != X(i, c)) {
                bool found = false;
                for (std::size_t r = 0; r < X.rows(); ++r) found |= X(r, c) == m1(i, c);
                CHECK(found);
            }

    CHECK_THROWS_AS(ablation_random(Matrix(), blocks, 5, 0), Error);
}

TEST_CASE("matched ablation replaces cells with the cross-group neighbour's values") {
    const std::size_t n = 50;
    Matrix X = oracles::random_matrix(n, 3, 17);
    std::vector<int> a = alternating(n);
    for (std::size_t i = 0; i < n; ++i) X(i, 0) += a[i] ? 1.5 : 0.0;
    const auto blocks = single_blocks(3);

    std::size_t eff = 0;
    const Matrix M = ablation_match_random(X, a, blocks, 80, 31, &eff);
    CHECK(eff > 0);

    // Recompute each row's nearest cross-group neighbour; any changed cell
    // must equal that neighbour's value in the same column.
    const SensitiveSplit sp = split_by_sensitive(X, a);
    const std::vector<std::size_t> nn0 = oracles::brute_force_nn(sp.group_a0, sp.group_a1);
    const std::vector<std::size_t> nn1 = oracles::brute_force_nn(sp.group_a1, sp.group_a0);
    std::vector<std::size_t> ref_of(n);
    for (std::size_t i = 0; i < sp.index_a0.size(); ++i)
        ref_of[sp.index_a0[i]] = sp.index_a1[nn0[i]];
    for (std::size_t i = 0; i < sp.index_a1.size(); ++i)
        ref_of[sp.index_a1[i]] = sp.index_a0[nn1[i]];

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < 3; ++c)
            if (M(i, c) != X(i, c)) CHECK(M(i, c) == X(ref_of[i], c));

    const Matrix M2 = ablation_match_random(X, a, blocks, 80, 31);
    CHECK(M == M2);
}
