#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fairshap/harness.hpp"
#include "fairshap/synth.hpp"

using namespace fairshap;
namespace fs = std::filesystem;

namespace {

std::string write_credit_csv(std::size_t rows, std::uint64_t seed) {
    const std::string path =
        (fs::temp_directory_path() / ("fairshap_harness_" + std::to_string(seed) + ".csv"))
            .string();
    write_csv(make_credit_dataset(rows, seed), path);
    return path;
}

std::string base_config(const std::string& csv) {
    return "[dataset]\n"
           "path = " + csv + "\n"
           "numeric_features = duration_months, credit_amount, age_years, "
           "installment_rate, residence_since, existing_credits, dependents, "
           "months_employed, utilization_pct\n"
           "categorical_features = checking_status, savings_status, purpose, housing, "
           "employment_since\n"
           "label = credit_risk\n"
           "label_positive = good\n"
           "sensitive = sex\n"
           "sensitive_positive = female\n"
           "\n"
           "[model]\n"
           "kind = logistic\n"
           "\n"
           "[experiment]\n"
           "folds = 3\n"
           "seed = 5\n";
}

}  // namespace

TEST_CASE("the config parser covers every section and rejects unknown entries") {
    const std::string text =
        "# comment\n"
        "[dataset]\n"
        "path = data.csv\n"
        "numeric_features = x1, x2\n"
        "categorical_features = c1\n"
        "label = y\n"
        "label_positive = yes, 1\n"
        "sensitive = a\n"
        "sensitive_positive = f\n"
        "[model]\n"
        "kind = boosted_stumps\n"
        "tree_count = 33\n"
        "learning_rate = 0.25\n"
        "iterations = 44\n"
        "l2_penalty = 0.5\n"
        "[fairshap]\n"
        "threshold = 0.1\n"
        "threshold_mode = absolute\n"
        "matcher = optimal_transport\n"
        "epsilon = 0.2\n"
        "estimator = sampled\n"
        "permutations = 99\n"
        "[baselines]\n"
        "cr_alpha = 0.7\n"
        "dir_repair_level = 0.6\n"
        "[experiment]\n"
        "methods = none, fairshap, correlation_remover\n"
        "folds = 4\n"
        "seed = 17\n"
        "out_dir = results\n"
        "dr_mode = label\n"
        "sweep = on\n"
        "sweep_points = 7\n";
    const ExperimentConfig cfg = parse_config_text(text);

    CHECK(cfg.dataset_path == "data.csv");
    CHECK(cfg.schema.feature_names ==
          std::vector<std::string>{"x1", "x2", "c1"});
    CHECK(cfg.schema.feature_kinds[2] == FeatureKind::categorical);
    CHECK(cfg.schema.label_positive_values == std::set<std::string>{"yes", "1"});
    CHECK(cfg.model.kind == ModelKind::boosted_stumps);
    CHECK(cfg.model.tree_count == 33);
    CHECK(cfg.model.learning_rate == 0.25);
    CHECK(cfg.fairshap.threshold == 0.1);
    CHECK(cfg.fairshap.threshold_mode == ThresholdMode::absolute);
    CHECK(cfg.fairshap.matcher == MatchMethod::optimal_transport);
    CHECK(cfg.fairshap.sinkhorn.epsilon == 0.2);
    CHECK(cfg.fairshap.estimator.mode == EstimatorConfig::Mode::sampled);
    CHECK(cfg.fairshap.estimator.permutations == 99);
    CHECK(cfg.cr_alpha == 0.7);
    CHECK(cfg.dir_repair_level == 0.6);
    CHECK(cfg.methods == std::vector<Method>{Method::none, Method::fairshap,
                                             Method::correlation_remover});
    CHECK(cfg.folds == 4);
    CHECK(cfg.seed == 17);
    CHECK(cfg.out_dir == "results");
    CHECK(cfg.dr_mode == DrMode::label);
    CHECK(cfg.sweep_enabled);
    CHECK(cfg.sweep_points == 7);

    CHECK_THROWS_WITH_AS(parse_config_text("[dataset]\nwat = 1\n"),
                         doctest::Contains("unknown key 'wat'"), Error);
    CHECK_THROWS_WITH_AS(parse_config_text("[galaxy]\nx = 1\n"),
                         doctest::Contains("unknown section"), Error);
    CHECK_THROWS_WITH_AS(parse_config_text("x = 1\n"),
                         doctest::Contains("outside a section"), Error);
    CHECK_THROWS_WITH_AS(parse_config_text("[dataset\npath = x\n"),
                         doctest::Contains("malformed section"), Error);
    CHECK_THROWS_WITH_AS(parse_config_text("[model]\nkind = perceptron\n"),
                         doctest::Contains("unknown model kind"), Error);
    CHECK_THROWS_WITH_AS(parse_config_text("[experiment]\nmethods = magic\n"),
                         doctest::Contains("unknown method"), Error);
}

TEST_CASE("method names round-trip") {
    for (Method m : {Method::none, Method::fairshap, Method::correlation_remover,
                     Method::disparate_impact_remover, Method::ablation_random,
                     Method::ablation_match_random})
        CHECK(method_from_name(method_name(m)) == m);
    CHECK_THROWS_AS(method_from_name("unheard_of"), Error);
}

TEST_CASE("a baseline-only experiment reports per-fold and aggregate metrics") {
    const std::string csv = write_credit_csv(240, 31);
    ExperimentConfig cfg = parse_config_text(base_config(csv));
    const ExperimentReport rep = run_experiment(cfg);

    REQUIRE(rep.methods.size() == 1);
    const MethodResult& res = rep.result_for(Method::none);
    REQUIRE(res.folds.size() == 3);
    for (const MethodFoldRecord& fr : res.folds) {
        CHECK(fr.metrics.accuracy > 0.5);
        CHECK(fr.metrics.dr >= 0.0);
        CHECK(fr.dr_train >= 0.0);
        CHECK(fr.modifications == 0);
        CHECK(fr.test_fold_untouched);
        CHECK(fr.metrics.data_fidelity == 0.0);
        CHECK(fr.metrics.training_adjustment_rate == 0.0);
    }
    CHECK(res.aggregate.count("accuracy") == 1);
    CHECK(res.aggregate.count("dr") == 1);
    CHECK(res.aggregate.count("dr_train") == 1);
    const Aggregate& acc = res.aggregate.at("accuracy");
    double mean = 0.0;
    for (const auto& fr : res.folds) mean += fr.metrics.accuracy / 3.0;
    CHECK(acc.mean == doctest::Approx(mean));
    CHECK(acc.missing == 0);

    CHECK_THROWS_AS(rep.result_for(Method::fairshap), Error);
    std::remove(csv.c_str());
}

TEST_CASE("experiment reports are deterministic once timing is excluded") {
    const std::string csv = write_credit_csv(200, 32);
    ExperimentConfig cfg = parse_config_text(base_config(csv));
    cfg.methods = {Method::none, Method::correlation_remover,
                   Method::disparate_impact_remover};
    const ExperimentReport r1 = run_experiment(cfg);
    const ExperimentReport r2 = run_experiment(cfg);
    CHECK(r1.to_json(false) == r2.to_json(false));
    // The timing block is the only nondeterministic part.
    CHECK(r1.to_json(true) != r1.to_json(false));
    std::remove(csv.c_str());
}

TEST_CASE("the report renderer rebuilds the csv tables from stored json") {
    const std::string csv = write_credit_csv(200, 33);
    const fs::path dir = fs::temp_directory_path() / "fairshap_render_test";
    fs::create_directories(dir);
    ExperimentConfig cfg = parse_config_text(base_config(csv));
    cfg.methods = {Method::none, Method::disparate_impact_remover};
    const ExperimentReport rep = run_experiment(cfg);

    const fs::path json_path = dir / "report.json";
    {
        std::ofstream out(json_path);
        out << rep.to_json();
    }
    render_report_json(json_path.string(), dir.string());
    CHECK(fs::exists(dir / "metrics.csv"));
    CHECK(fs::exists(dir / "aggregate.csv"));

    std::ifstream in(dir / "metrics.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "method,fold,accuracy,dr,dr_train,dp,eo,pqp,data_fidelity,"
          "training_adjustment_rate,modifications,test_adjustment_necessity");

    CHECK_THROWS_AS(render_report_json((dir / "missing.json").string(), dir.string()),
                    Error);
    fs::remove_all(dir);
    std::remove(csv.c_str());
}

TEST_CASE("property suites pass clean and fail under fault injection") {
    for (SuiteKind kind : {SuiteKind::shapley_axioms, SuiteKind::parity_bound,
                           SuiteKind::parity_bound_shift, SuiteKind::replacement_identity}) {
        const SuiteResult res = run_property_suite(kind, 7, 10);
        // the replacement suite only counts its threshold-zero cases as checks
        CHECK(res.checks >= (kind == SuiteKind::replacement_identity ? 4 : 10));
        CHECK(res.failures == 0);
        CHECK(res.passed());
        CHECK_FALSE(res.stats.empty());
        CHECK(res.counterexamples.empty());
    }

    const SuiteResult bad =
        run_property_suite(SuiteKind::shapley_axioms, 7, 10, SuiteCorruption::efficiency_offset);
    CHECK(bad.failures > 0);
    CHECK_FALSE(bad.passed());
    CHECK_FALSE(bad.counterexamples.empty());

    // Same seed, same counterexamples: failures are replayable.
    const SuiteResult bad2 =
        run_property_suite(SuiteKind::shapley_axioms, 7, 10, SuiteCorruption::efficiency_offset);
    CHECK(bad.counterexamples == bad2.counterexamples);
}

TEST_CASE("the command line maps outcomes onto exit codes") {
    CHECK(cli_dispatch({"--help"}) == 0);
    CHECK(cli_dispatch({"no_such_command"}) == 1);
    CHECK(cli_dispatch({"run"}) == 1);                      // missing --config
    CHECK(cli_dispatch({"run", "--config", "/no/file"}) == 1);
    CHECK(cli_dispatch({"verify", "bogus_suite"}) == 1);
    CHECK(cli_dispatch({"report", "/no/such.json"}) == 1);

    const std::string out =
        (fs::temp_directory_path() / "fairshap_cli_gen.csv").string();
    CHECK(cli_dispatch({"gen-data", "--rows", "80", "--seed", "3", "--out", out}) == 0);
    CHECK(fs::exists(out));
    CHECK(cli_dispatch({"verify", "shapley_axioms", "--count", "5", "--seed", "2"}) == 0);
    std::remove(out.c_str());
}

TEST_CASE("a full cli run writes the report bundle") {
    const std::string csv = write_credit_csv(200, 34);
    const fs::path dir = fs::temp_directory_path() / "fairshap_cli_run";
    fs::create_directories(dir);
    const fs::path cfg_path = dir / "cfg.ini";
    {
        std::ofstream out(cfg_path);
        out << base_config(csv) << "methods = none\nout_dir = " << dir.string() << "\n";
    }
    CHECK(cli_dispatch({"run", "--config", cfg_path.string()}) == 0);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "metrics.csv"));
    CHECK(fs::exists(dir / "aggregate.csv"));
    fs::remove_all(dir);
    std::remove(csv.c_str());
}
