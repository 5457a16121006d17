#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairshap/harness.hpp"
#include "fairshap/synth.hpp"

namespace fairshap {

namespace {

ExperimentConfig load_config(const std::string& path, const std::optional<std::uint64_t>& seed,
                             const std::optional<std::string>& out_dir) {
    ExperimentConfig cfg = parse_config_file(path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.out_dir = *out_dir;
    cfg.validate();
    return cfg;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
}

std::string fmt(double v) {
    char buf[32];
    snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

void print_experiment_summary(const ExperimentReport& report, std::ostream& out) {
    for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
    for (const MethodResult& mr : report.methods) {
        out << method_name(mr.method) << ":";
        for (const char* key : {"accuracy", "dr", "dr_train", "dp", "eo", "pqp",
                                "data_fidelity", "training_adjustment_rate"}) {
            const auto it = mr.aggregate.find(key);
            if (it == mr.aggregate.end()) continue;
            out << "  " << key << "=" << fmt(it->second.mean) << "±" << fmt(it->second.sd);
            if (it->second.missing > 0)
                out << " (" << it->second.missing << " folds undefined)";
        }
        const auto mods = mr.aggregate.find("modifications");
        if (mods != mr.aggregate.end() && mods->second.mean > 0.0)
            out << "  modifications=" << fmt(mods->second.mean);
        out << "  test_adjustment=" << (mr.test_adjustment_necessity ? "yes" : "no") << "\n";
    }
}

int cmd_run(const std::string& config_path, const std::optional<std::uint64_t>& seed,
            const std::optional<std::string>& out_dir) {
    const ExperimentConfig cfg = load_config(config_path, seed, out_dir);
    const ExperimentReport report = run_experiment(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    write_text(cfg.out_dir + "/report.json", report.to_json(true));
    write_experiment_csv(report, cfg.out_dir);
    print_experiment_summary(report, std::cout);
    if (cfg.sweep_enabled) {
        const SweepReport sweep = run_sweep(cfg);
        write_text(cfg.out_dir + "/sweep.json", sweep.to_json(true));
        write_sweep_csv(sweep, cfg.out_dir);
    }
    std::cout << "report written to " << cfg.out_dir << "/report.json\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::optional<std::uint64_t>& seed,
              const std::optional<std::string>& out_dir) {
    const ExperimentConfig cfg = load_config(config_path, seed, out_dir);
    const SweepReport sweep = run_sweep(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    write_text(cfg.out_dir + "/sweep.json", sweep.to_json(true));
    write_sweep_csv(sweep, cfg.out_dir);
    for (const SweepPoint& pt : sweep.averaged)
        std::cout << "n=" << pt.n_modifications << "  accuracy=" << fmt(pt.accuracy)
                  << "  dr=" << fmt(pt.dr) << "  dr_reduction=" << fmt(pt.dr_reduction_pct)
                  << "%\n";
    std::cout << "sweep written to " << cfg.out_dir << "/sweep.json\n";
    return 0;
}

int cmd_verify(const std::vector<std::string>& names, std::uint64_t seed, std::size_t count) {
    struct Entry {
        const char* name;
        SuiteKind kind;
        std::size_t default_count;
    };
    static const Entry table[] = {
        {"shapley_axioms", SuiteKind::shapley_axioms, 100},
        {"parity_bound", SuiteKind::parity_bound, 50},
        {"parity_bound_shift", SuiteKind::parity_bound_shift, 50},
        {"replacement_identity", SuiteKind::replacement_identity, 50},
    };

    std::vector<const Entry*> selected;
    if (names.empty()) {
        for (const Entry& e : table) selected.push_back(&e);
    } else {
        for (const std::string& n : names) {
            const Entry* found = nullptr;
            for (const Entry& e : table)
                if (n == e.name) found = &e;
            if (!found) throw Error("unknown suite '" + n + "'");
            selected.push_back(found);
        }
    }

    bool all_passed = true;
    for (const Entry* e : selected) {
        const SuiteResult r =
            run_property_suite(e->kind, seed, count > 0 ? count : e->default_count);
        std::cout << r.name << ": " << r.checks << " checks, " << r.failures
                  << " failures";
        char buf[64];
        for (const auto& [k, v] : r.stats) {
            snprintf(buf, sizeof buf, "%.3g", v);
            std::cout << "  " << k << "=" << buf;
        }
        std::cout << "\n";
        for (std::size_t i = 0; i < r.counterexamples.size() && i < 5; ++i)
            std::cout << "  counterexample: " << r.counterexamples[i] << "\n";
        all_passed = all_passed && r.passed();
    }
    return all_passed ? 0 : 2;
}

int cmd_match(const std::string& config_path, const std::optional<std::uint64_t>& seed,
              const std::optional<std::string>& out_dir) {
    const ExperimentConfig cfg = load_config(config_path, seed, out_dir);
    const TabularDataset ds = load_csv(cfg.dataset_path, cfg.schema);
    std::vector<std::size_t> all(ds.n_rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const EncodedMatrix em = encode(ds, all);
    const SensitiveSplit split = split_by_sensitive(em.values, ds.sensitive);

    SinkhornOptions opts = cfg.fairshap.sinkhorn;
    if (cfg.fairshap.matcher == MatchMethod::optimal_transport && opts.epsilon <= 0.0)
        opts.epsilon = default_sinkhorn_epsilon(split.group_a0, split.group_a1);

    std::filesystem::create_directories(cfg.out_dir);
    const struct {
        const char* file;
        const Matrix& G;
        const Matrix& G_other;
    } directions[] = {
        {"plan_a0_to_a1.csv", split.group_a0, split.group_a1},
        {"plan_a1_to_a0.csv", split.group_a1, split.group_a0},
    };
    for (const auto& dir : directions) {
        const MatchingPlan plan = cfg.fairshap.matcher == MatchMethod::optimal_transport
                                      ? sinkhorn_ot_match(dir.G, dir.G_other, opts)
                                      : nearest_neighbor_match(dir.G, dir.G_other);
        const std::string path = cfg.out_dir + "/" + dir.file;
        std::ofstream out(path);
        if (!out) throw Error("cannot write '" + path + "'");
        export_plan_csv(plan, out);
        std::cout << dir.file << ": " << plan.plan.rows() << "x" << plan.plan.cols()
                  << " method=" << (plan.method == MatchMethod::optimal_transport
                                        ? "optimal_transport"
                                        : "nearest_neighbour")
                  << " cost=" << fmt(transport_cost(plan, dir.G, dir.G_other));
        if (plan.method == MatchMethod::optimal_transport)
            std::cout << " iterations=" << plan.iterations
                      << " marginal_error=" << plan.marginal_error
                      << " converged=" << (plan.converged ? "yes" : "no");
        std::cout << "\n";
    }
    std::cout << "row/column indices are positions within each sensitive group\n";
    return 0;
}

int cmd_explain(const std::string& config_path, std::size_t fold,
                const std::optional<std::uint64_t>& seed,
                const std::optional<std::string>& out_dir) {
    const ExperimentConfig cfg = load_config(config_path, seed, out_dir);
    const TabularDataset ds = load_csv(cfg.dataset_path, cfg.schema);
    const KFoldResult kf = kfold_split(ds, cfg.folds, cfg.seed);
    if (fold >= kf.folds.size())
        throw Error("fold " + std::to_string(fold) + " out of range (folds=" +
                    std::to_string(kf.folds.size()) + ")");
    const FoldSplit& split = kf.folds[fold];
    const EncodedMatrix em = encode(ds, split.train);
    const Matrix X_train = em.values.select_rows(split.train);
    std::vector<int> a_train, y_train;
    for (auto i : split.train) {
        a_train.push_back(ds.sensitive[i]);
        y_train.push_back(ds.labels[i]);
    }
    TrainConfig tc = cfg.model;
    tc.seed = mix_seed(cfg.seed, fold);
    const auto model = train_model(X_train, a_train, y_train, tc);

    FairshapConfig fs = cfg.fairshap;
    fs.estimator.seed = mix_seed(cfg.seed, 1000 + fold);
    const SensitiveSplit groups = split_by_sensitive(X_train, a_train);
    if (fs.matcher == MatchMethod::optimal_transport && fs.sinkhorn.epsilon <= 0.0)
        fs.sinkhorn.epsilon = default_sinkhorn_epsilon(groups.group_a0, groups.group_a1);

    const ModifyResult dir0 = fairshap_modify(groups.group_a0, groups.group_a1, *model,
                                              em.blocks, fs);
    const ModifyResult dir1 = fairshap_modify(groups.group_a1, groups.group_a0, *model,
                                              em.blocks, fs);

    // Merge both directions into one table keyed by training-matrix row.
    struct Row {
        std::size_t row, feature;
        double phi;
    };
    std::vector<Row> rows;
    const auto collect = [&](const ModifyResult& mr, const std::vector<std::size_t>& index) {
        for (std::size_t i = 0; i < mr.attribution.phi.rows(); ++i)
            for (std::size_t k = 0; k < mr.attribution.phi.cols(); ++k)
                rows.push_back({index[i], k, mr.attribution.phi(i, k)});
    };
    collect(dir0, groups.index_a0);
    collect(dir1, groups.index_a1);
    std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
        return x.row != y.row ? x.row < y.row : x.feature < y.feature;
    });

    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = cfg.out_dir + "/phi_fold" + std::to_string(fold) + ".csv";
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << "row,raw_feature,phi\n";
    char buf[32];
    for (const Row& r : rows) {
        snprintf(buf, sizeof buf, "%.17g", r.phi);
        out << r.row << ',' << em.blocks[r.feature].name << ',' << buf << '\n';
    }
    std::cout << "estimator=" << dir0.attribution.estimator;
    if (dir0.attribution.estimator == "sampled")
        std::cout << " permutations=" << dir0.attribution.permutations;
    std::cout << " rows=" << X_train.rows() << " features=" << em.blocks.size() << "\n";
    std::cout << "attributions written to " << path << "\n";
    return 0;
}

int cmd_report(const std::string& json_path, const std::optional<std::string>& out_dir) {
    const std::string out = out_dir ? *out_dir
                                    : std::filesystem::path(json_path).parent_path().string();
    render_report_json(json_path, out.empty() ? "." : out);
    std::cout << "tables written to " << (out.empty() ? "." : out) << "\n";
    return 0;
}

int cmd_gen_data(std::size_t rows, std::uint64_t seed, const std::string& out_path) {
    const TabularDataset ds = make_credit_dataset(rows, seed);
    write_csv(ds, out_path);
    std::cout << "wrote " << ds.n_rows() << " rows to " << out_path << "\n";
    return 0;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args) {
    CLI::App app{"Fairness repair of tabular training data via matched attribution"};
    app.require_subcommand(1);

    std::string config_path, json_path, gen_out = "credit.csv";
    std::optional<std::uint64_t> seed_opt;
    std::optional<std::string> out_opt;
    std::uint64_t verify_seed = 7;
    std::size_t verify_count = 0, fold = 0, gen_rows = 1000;
    std::uint64_t gen_seed = 1;
    std::vector<std::string> suite_names;

    const auto add_common = [&](CLI::App* sub, bool with_config) {
        if (with_config)
            sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--seed", [&seed_opt](const std::vector<std::string>& v) {
               seed_opt = std::stoull(v.at(0));
               return true;
           },
           "override the config seed");
        sub->add_option("--out", [&out_opt](const std::vector<std::string>& v) {
               out_opt = v.at(0);
               return true;
           },
           "override the output directory");
    };

    CLI::App* run = app.add_subcommand("run", "run the k-fold experiment");
    add_common(run, true);
    CLI::App* sweep = app.add_subcommand("sweep", "modification-count sweep");
    add_common(sweep, true);
    CLI::App* verify = app.add_subcommand("verify", "run property suites");
    verify->add_option("suites", suite_names,
                       "suites to run (default: all): shapley_axioms, parity_bound, "
                       "parity_bound_shift, replacement_identity");
    verify->add_option("--seed", verify_seed, "suite seed");
    verify->add_option("--count", verify_count, "cases per suite (0 = suite default)");
    CLI::App* match = app.add_subcommand("match", "export cross-group matching plans");
    add_common(match, true);
    CLI::App* explain = app.add_subcommand("explain", "export per-instance attributions");
    add_common(explain, true);
    explain->add_option("--fold", fold, "fold whose training split to explain");
    CLI::App* report = app.add_subcommand("report", "re-render a stored JSON report to CSV");
    report->add_option("json", json_path, "report JSON file")->required();
    report->add_option("--out", [&out_opt](const std::vector<std::string>& v) {
              out_opt = v.at(0);
              return true;
          },
          "output directory (default: alongside the JSON)");
    CLI::App* gen = app.add_subcommand("gen-data", "write a synthetic credit dataset");
    gen->add_option("--rows", gen_rows, "number of rows");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output CSV path");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, seed_opt, out_opt);
        if (sweep->parsed()) return cmd_sweep(config_path, seed_opt, out_opt);
        if (verify->parsed()) return cmd_verify(suite_names, verify_seed, verify_count);
        if (match->parsed()) return cmd_match(config_path, seed_opt, out_opt);
        if (explain->parsed()) return cmd_explain(config_path, fold, seed_opt, out_opt);
        if (report->parsed()) return cmd_report(json_path, out_opt);
        if (gen->parsed()) return cmd_gen_data(gen_rows, gen_seed, gen_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace fairshap
