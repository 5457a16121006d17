#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "fairshap/matching.hpp"
#include "oracles.hpp"

using namespace fairshap;

TEST_CASE("nearest-neighbour plans agree with the exhaustive oracle") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
        const std::size_t n = 10 + (seed * 11) % 41;  // up to 50
        const std::size_t m = 7 + (seed * 13) % 43;
        const Matrix G = oracles::random_matrix(n, 6, seed);
        const Matrix H = oracles::random_matrix(m, 6, seed + 100);
        const MatchingPlan plan = nearest_neighbor_match(G, H);
        const std::vector<std::size_t> want = oracles::brute_force_nn(G, H);

        plan.validate();
        CHECK(plan.method == MatchMethod::nearest_neighbour);
        CHECK(plan.converged);
        CHECK(plan.marginal_error == 0.0);
        REQUIRE(plan.plan.rows() == n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                const double expect = j == want[i] ? 1.0 / static_cast<double>(n) : 0.0;
                CHECK(plan.plan(i, j) == expect);
            }
        }
    }
}

TEST_CASE("nearest-neighbour ties resolve to the first candidate") {
    const Matrix G = Matrix::from_rows({{0.0}});
    const Matrix H = Matrix::from_rows({{1.0}, {-1.0}});  // equidistant
    const MatchingPlan plan = nearest_neighbor_match(G, H);
    CHECK(plan.plan(0, 0) == 1.0);
    CHECK(plan.plan(0, 1) == 0.0);
}

TEST_CASE("matching rejects degenerate inputs") {
    const Matrix G = oracles::random_matrix(3, 2, 1);
    CHECK_THROWS_WITH_AS(nearest_neighbor_match(G, Matrix()),
                         doctest::Contains("non-empty"), Error);
    CHECK_THROWS_WITH_AS(nearest_neighbor_match(G, oracles::random_matrix(3, 5, 2)),
                         doctest::Contains("different widths"), Error);
    Matrix bad = G;
    bad(0, 0) = std::nan("");
    CHECK_THROWS_WITH_AS(nearest_neighbor_match(bad, G), doctest::Contains("non-finite"),
                         Error);

    MatchingPlan mp;
    mp.plan = Matrix(1, 1, 0.5);
    CHECK_THROWS_WITH_AS(mp.validate(), doctest::Contains("total mass"), Error);
    mp.plan(0, 0) = -1.0;
    CHECK_THROWS_WITH_AS(mp.validate(), doctest::Contains("negative mass"), Error);
}

TEST_CASE("sinkhorn plans satisfy both marginals to tolerance") {
    const Matrix G = oracles::random_matrix(8, 4, 11);
    const Matrix H = oracles::random_matrix(5, 4, 12);
    SinkhornOptions opt;
    opt.epsilon = default_sinkhorn_epsilon(G, H);
    const MatchingPlan plan = sinkhorn_ot_match(G, H, opt);

    plan.validate();
    CHECK(plan.method == MatchMethod::optimal_transport);
    CHECK(plan.converged);
    CHECK(plan.iterations > 0);
    CHECK(plan.marginal_error <= opt.tol);
    for (std::size_t i = 0; i < 8; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 5; ++j) s += plan.plan(i, j);
        CHECK(s == doctest::Approx(1.0 / 8).epsilon(1e-5));
    }
    for (std::size_t j = 0; j < 5; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < 8; ++i) s += plan.plan(i, j);
        CHECK(s == doctest::Approx(1.0 / 5).epsilon(1e-5));
    }
}

TEST_CASE("small-epsilon sinkhorn cost approaches the exact transport optimum") {
    for (std::uint64_t seed : {21ULL, 22ULL, 23ULL, 24ULL, 25ULL}) {
        const std::size_t n = 3 + seed % 4, m = 2 + seed % 5;
        const Matrix G = oracles::random_matrix(n, 3, seed);
        const Matrix H = oracles::random_matrix(m, 3, seed + 50);

        Matrix C(n, m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
                C(i, j) = squared_distance(G.row(i), H.row(j));
        const double lp = oracles::exact_transport_cost(C);

        SinkhornOptions opt;
        opt.epsilon = 0.01 * default_sinkhorn_epsilon(G, H) / 0.05;  // 1% of mean cost
        opt.max_iters = 200000;
        // at this epsilon the log-domain updates bottom out near 3e-7 marginal
        // error in double precision, so ask for 1e-6 rather than chase the floor
        opt.tol = 1e-6;
        const MatchingPlan plan = sinkhorn_ot_match(G, H, opt);
        const double entropic = transport_cost(plan, G, H);

        CHECK(plan.converged);
        // the plan satisfies the marginals only up to tol, so its cost can dip
        // a hair below the exact-marginal optimum
        CHECK(entropic >= lp - 1e-4);
        CHECK(entropic <= lp * 1.05 + 1e-9);
    }
}

TEST_CASE("sinkhorn primal objective decreases along the iterations") {
    const Matrix G = oracles::random_matrix(6, 3, 31);
    const Matrix H = oracles::random_matrix(7, 3, 32);
    SinkhornOptions opt;
    opt.epsilon = default_sinkhorn_epsilon(G, H);
    std::vector<double> trace;
    sinkhorn_ot_match(G, H, opt, &trace);
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-9);
}

TEST_CASE("an iteration cap that is too small reports non-convergence") {
    const Matrix G = oracles::random_matrix(9, 4, 41);
    const Matrix H = oracles::random_matrix(9, 4, 42);
    SinkhornOptions opt;
    opt.epsilon = 1e-4 * default_sinkhorn_epsilon(G, H);
    opt.max_iters = 1;
    const MatchingPlan plan = sinkhorn_ot_match(G, H, opt);
    CHECK_FALSE(plan.converged);
    CHECK(plan.iterations == 1);
    CHECK(plan.marginal_error > opt.tol);
    CHECK_NOTHROW(plan.validate());

    CHECK_THROWS_WITH_AS(sinkhorn_ot_match(G, H, SinkhornOptions{}),
                         doctest::Contains("epsilon"), Error);
}

TEST_CASE("the default epsilon is a twentieth of the mean pairwise cost") {
    const Matrix G = Matrix::from_rows({{0.0}, {2.0}});
    const Matrix H = Matrix::from_rows({{1.0}});
    // Costs 1 and 1, mean 1.
    CHECK(default_sinkhorn_epsilon(G, H) == doctest::Approx(0.05));
}

TEST_CASE("transport cost is the plan-weighted sum of squared distances") {
    const Matrix G = Matrix::from_rows({{0.0}, {1.0}});
    const Matrix H = Matrix::from_rows({{0.0}, {3.0}});
    MatchingPlan plan;
    plan.plan = Matrix(2, 2);
    plan.plan(0, 0) = 0.5;
    plan.plan(1, 1) = 0.25;
    plan.plan(1, 0) = 0.25;
    CHECK(transport_cost(plan, G, H) ==
          doctest::Approx(0.5 * 0.0 + 0.25 * 4.0 + 0.25 * 1.0));
    CHECK_THROWS_AS(transport_cost(plan, G, oracles::random_matrix(5, 1, 0)), Error);
}

TEST_CASE("reference rows take the plan-mass argmax with first-index ties") {
    const Matrix H = Matrix::from_rows({{10.0}, {20.0}, {30.0}});
    MatchingPlan plan;
    plan.plan = Matrix(2, 3);
    plan.plan(0, 1) = 0.3;
    plan.plan(0, 2) = 0.2;
    plan.plan(1, 0) = 0.25;
    plan.plan(1, 2) = 0.25;  // tie with column 0

    const ReferenceSet ref = build_reference(plan, H);
    CHECK(ref.source_index == std::vector<std::size_t>{1, 0});
    CHECK(ref.rows(0, 0) == 20.0);
    CHECK(ref.rows(1, 0) == 10.0);

    MatchingPlan empty_row = plan;
    empty_row.plan(0, 1) = 0.0;
    empty_row.plan(0, 2) = 0.0;
    CHECK_THROWS_WITH_AS(build_reference(empty_row, H), doctest::Contains("no mass"),
                         Error);
    CHECK_THROWS_AS(build_reference(plan, Matrix(2, 1)), Error);
}

TEST_CASE("conditional rows renormalize the plan row") {
    MatchingPlan plan;
    plan.plan = Matrix(2, 2);
    plan.plan(0, 0) = 0.1;
    plan.plan(0, 1) = 0.3;
    plan.plan(1, 0) = 0.6;
    const std::vector<double> p = conditional_row(plan, 0);
    CHECK(p[0] == doctest::Approx(0.25));
    CHECK(p[1] == doctest::Approx(0.75));
    CHECK_THROWS_AS(conditional_row(plan, 7), Error);

    MatchingPlan zero;
    zero.plan = Matrix(1, 2);
    CHECK_THROWS_WITH_AS(conditional_row(zero, 0), doctest::Contains("zero mass"), Error);
}

TEST_CASE("plan export lists only the occupied cells") {
    MatchingPlan plan;
    plan.plan = Matrix(2, 2);
    plan.plan(0, 1) = 0.5;
    plan.plan(1, 0) = 0.5;
    std::ostringstream out;
    export_plan_csv(plan, out);
    CHECK(out.str() == "i,j,mass\n0,1,0.5\n1,0,0.5\n");
}
