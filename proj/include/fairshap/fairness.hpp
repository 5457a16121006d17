#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairshap/dataset.hpp"
#include "fairshap/matrix.hpp"
#include "fairshap/model.hpp"

namespace fairshap {

// Probability mode compares predicted probabilities with the sensitive input
// toggled; label mode compares the thresholded decisions instead.
enum class DrMode { probability, label };

// Discriminative risk of one instance: |f(x, A=0) - f(x, A=1)|.
double dr_instance(const Predictor& f, std::span<const double> x,
                   DrMode mode = DrMode::probability);

double dr_dataset(const Predictor& f, const Matrix& X, DrMode mode = DrMode::probability);

double accuracy(const Predictor& f, const Matrix& X, const std::vector<int>& a,
                const std::vector<int>& y);

// |P(yhat=1 | A=0) - P(yhat=1 | A=1)|, each group evaluated with its own A.
double demographic_parity(const Predictor& f, const Matrix& X, const std::vector<int>& a);

// True-positive-rate gap between groups.
double equality_of_opportunity(const Predictor& f, const Matrix& X,
                               const std::vector<int>& a, const std::vector<int>& y);

// Precision gap between groups; throws MetricUndefined when a group has no
// positive predictions.
struct MetricUndefined : Error {
    using Error::Error;
};

double predictive_quality_parity(const Predictor& f, const Matrix& X,
                                 const std::vector<int>& a, const std::vector<int>& y);

// Exact first Wasserstein distance between two empirical distributions on
// the real line (quantile coupling; sample sizes may differ).
double wasserstein_1d(std::vector<double> a, std::vector<double> b);

// Mean per-encoded-column W1 between the original and modified data.
double data_fidelity(const Matrix& original, const Matrix& modified);

// Fraction of raw-feature cells whose value changed; a one-hot block counts
// as a single cell.
double training_adjustment_rate(const Matrix& original, const Matrix& modified,
                                std::span<const RawBlock> blocks);

// Per-column binning for the discrete TV distance: categorical columns use
// their values as-is, numeric columns use fixed-width bins.
struct ColumnBinning {
    bool categorical = true;
    double lo = 0.0;
    double width = 1.0;
    std::size_t bins = 1;
};

struct BinningSpec {
    std::vector<ColumnBinning> columns;
};

// (1/2) sum over joint histogram cells of |p0 - p1|; exact when all columns
// are categorical.
double tv_distance_discrete(const Matrix& d0, const Matrix& d1, const BinningSpec& spec);

struct FairnessReport {
    double accuracy = 0.0;
    double dr = 0.0;
    double dp = 0.0;
    double eo = 0.0;
    std::optional<double> pqp;                 // missing when undefined on a fold
    double data_fidelity = 0.0;
    double training_adjustment_rate = 0.0;
    bool test_adjustment_necessity = false;
    std::optional<double> epsilon;             // OT methods only
    DrMode dr_mode = DrMode::probability;
};

}  // namespace fairshap
