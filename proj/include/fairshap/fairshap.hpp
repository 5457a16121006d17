#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fairshap/dataset.hpp"
#include "fairshap/fairness.hpp"
#include "fairshap/matching.hpp"
#include "fairshap/matrix.hpp"
#include "fairshap/model.hpp"
#include "fairshap/shapley.hpp"

namespace fairshap {

// Signed mode replaces cells with phi >= threshold (fairness-degrading
// contributions only); absolute mode uses |phi| >= threshold.
enum class ThresholdMode { signed_contribution, absolute };

struct FairshapConfig {
    double threshold = 0.05;
    ThresholdMode threshold_mode = ThresholdMode::signed_contribution;
    MatchMethod matcher = MatchMethod::nearest_neighbour;
    SinkhornOptions sinkhorn;  // epsilon <= 0 means the relative default
    EstimatorConfig estimator;

    void validate() const;
};

// One raw-feature cell replacement: the whole encoded block of `raw_feature`
// in row `row` (an index of the matrix handed to fairshap_augment) was
// overwritten with the matched reference's block.
struct ModEntry {
    std::size_t row = 0;
    std::size_t raw_feature = 0;
    double phi = 0.0;
    std::size_t reference_row = 0;  // row of the full matrix the values came from
    std::vector<double> old_block, new_block;
};

struct ModificationLog {
    std::vector<ModEntry> entries;  // descending phi; ties by (row, feature)
    std::size_t from_group0 = 0;    // entries whose target row has A=0
    std::size_t from_group1 = 0;
};

// One direction of the algorithm: attribute the discriminative risk of every
// target-group row and overwrite cells selected by the threshold rule with
// the matched reference values. Rows/log indices are target-group-local.
struct ModifyResult {
    Matrix modified;        // target group rows after replacement
    ModificationLog log;    // row = target-group-local index
    ShapleyAttribution attribution;
    ReferenceSet reference;
    MatchingPlan plan;
};

ModifyResult fairshap_modify(const Matrix& target, const Matrix& other,
                             const Predictor& f, std::span<const RawBlock> blocks,
                             const FairshapConfig& cfg);

// Both directions with the same fixed model, recombined in original row
// order. Log rows are indices of X.
struct AugmentResult {
    Matrix data;
    ModificationLog log;
    double sinkhorn_epsilon = 0.0;  // absolute epsilon used (OT matcher only)
    bool matching_converged = true;
};

AugmentResult fairshap_augment(const Matrix& X, const std::vector<int>& a,
                               const Predictor& f, std::span<const RawBlock> blocks,
                               const FairshapConfig& cfg);

// Diagnostic for the threshold-replacement identity: per instance, the drop
// in discriminative risk from applying its replacements versus the sum of
// the phi values of the replaced cells (equal when every cell is replaced
// and the attribution is exact).
struct ReplacementIdentityStats {
    std::size_t instances = 0;       // instances with at least one replacement
    double mean_abs_gap = 0.0;
    double max_abs_gap = 0.0;
    std::size_t grand_coalition_instances = 0;  // all features replaced
    double max_grand_coalition_gap = 0.0;
};

ReplacementIdentityStats replacement_identity_stats(const Matrix& X_before,
                                                    const Matrix& X_after,
                                                    const ModificationLog& log,
                                                    const Predictor& f,
                                                    std::span<const RawBlock> blocks);

// Retrains on growing prefixes of the combined modification log and records
// held-out metrics per prefix. Point 0 is the unmodified baseline.
struct SweepPoint {
    std::size_t n_modifications = 0;
    double accuracy = 0.0;
    double dr = 0.0;
    double dp = 0.0;
    double eo = 0.0;
    std::optional<double> pqp;
    double dr_reduction_pct = 0.0;  // relative to the point-0 model
};

std::vector<SweepPoint> modification_sweep(
    const Matrix& X_train, const std::vector<int>& a_train, const std::vector<int>& y_train,
    const Matrix& X_test, const std::vector<int>& a_test, const std::vector<int>& y_test,
    std::span<const RawBlock> blocks, const Predictor& baseline,
    const TrainConfig& train_cfg, const FairshapConfig& cfg, std::size_t n_points);

void export_log_csv(const ModificationLog& log, std::span<const RawBlock> blocks,
                    std::ostream& out);

}  // namespace fairshap
