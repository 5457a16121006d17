#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fairshap/matrix.hpp"

namespace fairshap {

enum class MatchMethod { nearest_neighbour, optimal_transport };

// Joint coupling between the target group rows (n) and the other group's
// rows (m). Entries are nonnegative and sum to 1. For nearest-neighbour
// matching each row carries mass 1/n on a single column.
struct MatchingPlan {
    Matrix plan;  // n x m
    MatchMethod method = MatchMethod::nearest_neighbour;
    std::string cost_metric = "squared_euclidean";
    std::size_t iterations = 0;     // Sinkhorn iterations performed
    double marginal_error = 0.0;    // final max marginal violation
    bool converged = true;

    void validate() const;
};

MatchingPlan nearest_neighbor_match(const Matrix& G, const Matrix& G_other);

struct SinkhornOptions {
    double epsilon = 0.0;           // absolute entropic regularization, > 0
    std::size_t max_iters = 10000;
    double tol = 1e-6;              // max absolute marginal violation
};

// Entropic OT with uniform marginals (1/n, 1/m), squared Euclidean cost,
// log-domain updates. A plan that fails to reach `tol` within `max_iters`
// is returned with converged=false rather than discarded.
MatchingPlan sinkhorn_ot_match(const Matrix& G, const Matrix& G_other,
                               const SinkhornOptions& opt,
                               std::vector<double>* objective_trace = nullptr);

// Default absolute epsilon: 0.05 times the mean pairwise cost.
double default_sinkhorn_epsilon(const Matrix& G, const Matrix& G_other);

double transport_cost(const MatchingPlan& plan, const Matrix& G, const Matrix& G_other);

// Reference data: for each target row i, the other-group row with the
// largest plan mass (ties resolved toward the smallest index).
struct ReferenceSet {
    Matrix rows;
    std::vector<std::size_t> source_index;  // row of the other group
};

ReferenceSet build_reference(const MatchingPlan& plan, const Matrix& G_other);

// P(j | i): row i of the plan normalized to sum 1.
std::vector<double> conditional_row(const MatchingPlan& plan, std::size_t i);

void export_plan_csv(const MatchingPlan& plan, std::ostream& out);

}  // namespace fairshap
