#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairshap/config.hpp"
#include "fairshap/fairness.hpp"
#include "fairshap/fairshap.hpp"

namespace fairshap {

struct Aggregate {
    double mean = 0.0;
    double sd = 0.0;       // sample standard deviation over folds
    std::size_t missing = 0;
};

struct MethodFoldRecord {
    std::size_t fold = 0;
    FairnessReport metrics;          // evaluated on the held-out fold
    double dr_train = 0.0;           // retrained model's risk on its training data
    std::size_t modifications = 0;   // log entries / draws
    std::size_t effective_changes = 0;
    std::optional<ReplacementIdentityStats> identity;
    bool test_fold_untouched = true;
};

struct MethodResult {
    Method method = Method::none;
    bool test_adjustment_necessity = false;
    std::vector<MethodFoldRecord> folds;
    std::map<std::string, Aggregate> aggregate;  // accuracy, dr, dr_train, dp, eo, pqp, ...
};

struct ExperimentReport {
    ExperimentConfig config;
    bool kfold_label_only_fallback = false;
    std::vector<std::string> warnings;
    std::vector<MethodResult> methods;
    double total_seconds = 0.0;

    const MethodResult& result_for(Method m) const;
    std::string to_json(bool include_timing = true) const;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

struct SweepFold {
    std::size_t fold = 0;
    std::vector<SweepPoint> points;
};

struct SweepReport {
    ExperimentConfig config;
    std::vector<SweepFold> folds;
    std::vector<SweepPoint> averaged;  // pointwise mean across folds
    double total_seconds = 0.0;

    std::string to_json(bool include_timing = true) const;
};

SweepReport run_sweep(const ExperimentConfig& cfg);

// Rendering of stored reports into CSV side tables.
void write_experiment_csv(const ExperimentReport& report, const std::string& out_dir);
void write_sweep_csv(const SweepReport& report, const std::string& out_dir);
void render_report_json(const std::string& json_path, const std::string& out_dir);

// Property suites: seeded, self-contained checks of the attribution axioms,
// the distribution-shift bounds, and the replacement identity. Each returns
// the number of checks and any counterexamples (replayable via seed).
enum class SuiteKind { shapley_axioms, parity_bound, parity_bound_shift, replacement_identity };

enum class SuiteCorruption { none, efficiency_offset };

struct SuiteResult {
    std::string name;
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::vector<std::string> counterexamples;
    std::map<std::string, double> stats;

    bool passed() const { return failures == 0; }
};

SuiteResult run_property_suite(SuiteKind kind, std::uint64_t seed, std::size_t count,
                               SuiteCorruption corruption = SuiteCorruption::none);

// Command line entry point; returns the process exit code (0 = success,
// 1 = configuration or data error, 2 = verification failure).
int cli_dispatch(const std::vector<std::string>& args);

}  // namespace fairshap
