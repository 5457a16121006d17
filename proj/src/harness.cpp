#include "fairshap/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fairshap/baselines.hpp"

namespace fairshap {

using ordered_json = nlohmann::ordered_json;

namespace {

std::uint64_t fnv_hash(const Matrix& m) {
    std::uint64_t h = 1469598103934665603ULL;
    const auto& data = m.data();
    const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data.data());
    for (std::size_t i = 0; i < data.size() * sizeof(double); ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::string kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::logistic: return "logistic";
        case ModelKind::boosted_stumps: return "boosted_stumps";
        case ModelKind::rule_table: return "rule_table";
    }
    return "?";
}

ordered_json config_to_json(const ExperimentConfig& cfg) {
    ordered_json j;
    ordered_json ds;
    ds["path"] = cfg.dataset_path;
    ordered_json numeric = ordered_json::array(), categorical = ordered_json::array();
    for (std::size_t f = 0; f < cfg.schema.feature_names.size(); ++f)
        (cfg.schema.feature_kinds[f] == FeatureKind::numeric ? numeric : categorical)
            .push_back(cfg.schema.feature_names[f]);
    ds["numeric_features"] = numeric;
    ds["categorical_features"] = categorical;
    ds["label"] = cfg.schema.label_name;
    ds["label_positive"] = cfg.schema.label_positive_values;
    ds["sensitive"] = cfg.schema.sensitive_name;
    ds["sensitive_positive"] = cfg.schema.sensitive_positive_values;
    j["dataset"] = ds;

    ordered_json model;
    model["kind"] = kind_name(cfg.model.kind);
    model["learning_rate"] = cfg.model.learning_rate;
    model["iterations"] = cfg.model.iterations;
    model["l2_penalty"] = cfg.model.l2_penalty;
    model["tree_count"] = cfg.model.tree_count;
    j["model"] = model;

    ordered_json fs;
    fs["threshold"] = cfg.fairshap.threshold;
    fs["threshold_mode"] = cfg.fairshap.threshold_mode == ThresholdMode::absolute
                               ? "absolute"
                               : "signed";
    fs["matcher"] = cfg.fairshap.matcher == MatchMethod::optimal_transport
                        ? "optimal_transport"
                        : "nearest_neighbour";
    switch (cfg.fairshap.estimator.mode) {
        case EstimatorConfig::Mode::automatic: fs["estimator"] = "auto"; break;
        case EstimatorConfig::Mode::exact: fs["estimator"] = "exact"; break;
        case EstimatorConfig::Mode::sampled: fs["estimator"] = "sampled"; break;
    }
    fs["permutations"] = cfg.fairshap.estimator.permutations;
    fs["epsilon"] = cfg.fairshap.sinkhorn.epsilon;
    fs["sinkhorn_max_iters"] = cfg.fairshap.sinkhorn.max_iters;
    fs["sinkhorn_tol"] = cfg.fairshap.sinkhorn.tol;
    j["fairshap"] = fs;

    ordered_json bl;
    bl["cr_alpha"] = cfg.cr_alpha;
    bl["dir_repair_level"] = cfg.dir_repair_level;
    j["baselines"] = bl;

    ordered_json ex;
    ordered_json methods = ordered_json::array();
    for (Method m : cfg.methods) methods.push_back(method_name(m));
    ex["methods"] = methods;
    ex["folds"] = cfg.folds;
    ex["seed"] = cfg.seed;
    ex["out_dir"] = cfg.out_dir;
    ex["sweep"] = cfg.sweep_enabled;
    ex["sweep_points"] = cfg.sweep_points;
    ex["dr_mode"] = cfg.dr_mode == DrMode::label ? "label" : "probability";
    j["experiment"] = ex;
    return j;
}

struct FoldData {
    std::size_t fold = 0;
    Matrix X_train, X_test;
    std::vector<int> a_train, a_test, y_train, y_test;
    std::vector<RawBlock> blocks;
    TrainConfig train_cfg;
    FairshapConfig fs_cfg;
    std::unique_ptr<Predictor> baseline;
};

std::vector<FoldData> prepare_folds(const TabularDataset& ds, const ExperimentConfig& cfg,
                                    bool* fallback, std::vector<std::string>* warnings) {
    const KFoldResult kf = kfold_split(ds, cfg.folds, cfg.seed);
    if (fallback) *fallback = kf.label_only_fallback;
    if (kf.label_only_fallback && warnings)
        warnings->push_back(
            "kfold: a (label,sensitive) cell was smaller than k; "
            "stratified by label only");

    std::vector<FoldData> folds;
    for (std::size_t f = 0; f < kf.folds.size(); ++f) {
        const auto& split = kf.folds[f];
        const EncodedMatrix em = encode(ds, split.train);
        if (em.unseen_category_count > 0 && warnings)
            warnings->push_back("fold " + std::to_string(f) + ": " +
                                std::to_string(em.unseen_category_count) +
                                " feature values outside the training-fold categories");
        FoldData fd;
        fd.fold = f;
        fd.blocks = em.blocks;
        fd.X_train = em.values.select_rows(split.train);
        fd.X_test = em.values.select_rows(split.test);
        for (auto i : split.train) {
            fd.a_train.push_back(ds.sensitive[i]);
            fd.y_train.push_back(ds.labels[i]);
        }
        for (auto i : split.test) {
            fd.a_test.push_back(ds.sensitive[i]);
            fd.y_test.push_back(ds.labels[i]);
        }
        fd.train_cfg = cfg.model;
        fd.train_cfg.seed = mix_seed(cfg.seed, f);
        fd.fs_cfg = cfg.fairshap;
        fd.fs_cfg.estimator.seed = mix_seed(cfg.seed, 1000 + f);
        fd.baseline = train_model(fd.X_train, fd.a_train, fd.y_train, fd.train_cfg);
        folds.push_back(std::move(fd));
    }
    return folds;
}

FairnessReport eval_metrics(const Predictor& f, const Matrix& X_test,
                            const std::vector<int>& a_test, const std::vector<int>& y_test,
                            DrMode dr_mode) {
    FairnessReport rep;
    rep.dr_mode = dr_mode;
    rep.accuracy = accuracy(f, X_test, a_test, y_test);
    rep.dr = dr_dataset(f, X_test, dr_mode);
    rep.dp = demographic_parity(f, X_test, a_test);
    rep.eo = equality_of_opportunity(f, X_test, a_test, y_test);
    try {
        rep.pqp = predictive_quality_parity(f, X_test, a_test, y_test);
    } catch (const MetricUndefined&) {
        rep.pqp.reset();
    }
    return rep;
}

struct Welford {
    std::size_t n = 0;
    double mean = 0.0, m2 = 0.0;
    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    Aggregate finish(std::size_t folds) const {
        Aggregate a;
        a.mean = n ? mean : 0.0;
        a.sd = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
        a.missing = folds - n;
        return a;
    }
};

void aggregate_method(MethodResult& mr, std::size_t folds) {
    std::map<std::string, Welford> acc;
    for (const MethodFoldRecord& r : mr.folds) {
        acc["accuracy"].add(r.metrics.accuracy);
        acc["dr"].add(r.metrics.dr);
        acc["dr_train"].add(r.dr_train);
        acc["dp"].add(r.metrics.dp);
        acc["eo"].add(r.metrics.eo);
        if (r.metrics.pqp) acc["pqp"].add(*r.metrics.pqp);
        acc["data_fidelity"].add(r.metrics.data_fidelity);
        acc["training_adjustment_rate"].add(r.metrics.training_adjustment_rate);
        acc["modifications"].add(static_cast<double>(r.modifications));
    }
    for (const auto& [name, w] : acc) mr.aggregate[name] = w.finish(folds);
}

std::string format_g(double v) {
    char buf[32];
    snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const MethodResult& ExperimentReport::result_for(Method m) const {
    for (const MethodResult& mr : methods)
        if (mr.method == m) return mr;
    throw Error("report: method '" + method_name(m) + "' not present");
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    const TabularDataset ds = load_csv(cfg.dataset_path, cfg.schema);
    ExperimentReport report;
    report.config = cfg;

    std::vector<FoldData> folds =
        prepare_folds(ds, cfg, &report.kfold_label_only_fallback, &report.warnings);

    // The ablations reuse the paired modification count from the
    // attribution-guided run on the same fold, so that run is computed on
    // demand even when not listed as a method.
    std::vector<std::unique_ptr<AugmentResult>> fairshap_aug(folds.size());
    auto ensure_fairshap = [&](FoldData& fd) -> const AugmentResult& {
        if (!fairshap_aug[fd.fold]) {
            fairshap_aug[fd.fold] = std::make_unique<AugmentResult>(fairshap_augment(
                fd.X_train, fd.a_train, *fd.baseline, fd.blocks, fd.fs_cfg));
            if (!fairshap_aug[fd.fold]->matching_converged)
                report.warnings.push_back("fold " + std::to_string(fd.fold) +
                                          ": transport matching did not converge");
        }
        return *fairshap_aug[fd.fold];
    };

    for (Method method : cfg.methods) {
        MethodResult mr;
        mr.method = method;
        mr.test_adjustment_necessity = method == Method::correlation_remover ||
                                       method == Method::disparate_impact_remover;

        for (FoldData& fd : folds) {
            MethodFoldRecord rec;
            rec.fold = fd.fold;
            const std::uint64_t test_sum_before = fnv_hash(fd.X_test);

            switch (method) {
                case Method::none: {
                    rec.metrics =
                        eval_metrics(*fd.baseline, fd.X_test, fd.a_test, fd.y_test, cfg.dr_mode);
                    rec.dr_train = dr_dataset(*fd.baseline, fd.X_train, cfg.dr_mode);
                    break;
                }
                case Method::fairshap: {
                    const AugmentResult& aug = ensure_fairshap(fd);
                    const auto model =
                        train_model(aug.data, fd.a_train, fd.y_train, fd.train_cfg);
                    rec.metrics =
                        eval_metrics(*model, fd.X_test, fd.a_test, fd.y_test, cfg.dr_mode);
                    rec.dr_train = dr_dataset(*model, aug.data, cfg.dr_mode);
                    rec.metrics.data_fidelity = data_fidelity(fd.X_train, aug.data);
                    rec.metrics.training_adjustment_rate =
                        training_adjustment_rate(fd.X_train, aug.data, fd.blocks);
                    rec.modifications = aug.log.entries.size();
                    rec.effective_changes = rec.modifications;
                    if (cfg.fairshap.matcher == MatchMethod::optimal_transport)
                        rec.metrics.epsilon = aug.sinkhorn_epsilon;
                    rec.identity = replacement_identity_stats(fd.X_train, aug.data, aug.log,
                                                              *fd.baseline, fd.blocks);
                    break;
                }
                case Method::correlation_remover: {
                    const CorrelationRemover cr =
                        CorrelationRemover::fit(fd.X_train, fd.a_train, cfg.cr_alpha);
                    const Matrix Xtr = cr.transform(fd.X_train, fd.a_train);
                    const Matrix Xte = cr.transform(fd.X_test, fd.a_test);
                    // The transform consumes the sensitive attribute; the
                    // downstream model gets a neutral constant instead.
                    const std::vector<int> a_zero(fd.a_train.size(), 0);
                    const auto model = train_model(Xtr, a_zero, fd.y_train, fd.train_cfg);
                    rec.metrics = eval_metrics(*model, Xte, fd.a_test, fd.y_test, cfg.dr_mode);
                    rec.dr_train = dr_dataset(*model, Xtr, cfg.dr_mode);
                    rec.metrics.data_fidelity = data_fidelity(fd.X_train, Xtr);
                    rec.metrics.training_adjustment_rate =
                        training_adjustment_rate(fd.X_train, Xtr, fd.blocks);
                    rec.metrics.test_adjustment_necessity = true;
                    break;
                }
                case Method::disparate_impact_remover: {
                    const DisparateImpactRemover dir = DisparateImpactRemover::fit(
                        fd.X_train, fd.a_train, fd.blocks, cfg.dir_repair_level);
                    const Matrix Xtr = dir.transform(fd.X_train, fd.a_train);
                    const Matrix Xte = dir.transform(fd.X_test, fd.a_test);
                    const auto model = train_model(Xtr, fd.a_train, fd.y_train, fd.train_cfg);
                    rec.metrics = eval_metrics(*model, Xte, fd.a_test, fd.y_test, cfg.dr_mode);
                    rec.dr_train = dr_dataset(*model, Xtr, cfg.dr_mode);
                    rec.metrics.data_fidelity = data_fidelity(fd.X_train, Xtr);
                    rec.metrics.training_adjustment_rate =
                        training_adjustment_rate(fd.X_train, Xtr, fd.blocks);
                    rec.metrics.test_adjustment_necessity = true;
                    break;
                }
                case Method::ablation_random:
                case Method::ablation_match_random: {
                    const std::size_t n_mods = ensure_fairshap(fd).log.entries.size();
                    std::size_t effective = 0;
                    const std::uint64_t ablation_seed = mix_seed(cfg.seed, 2000 + fd.fold);
                    const Matrix X_mod =
                        method == Method::ablation_random
                            ? ablation_random(fd.X_train, fd.blocks, n_mods, ablation_seed,
                                              &effective)
                            : ablation_match_random(fd.X_train, fd.a_train, fd.blocks,
                                                    n_mods, ablation_seed, &effective);
                    const auto model = train_model(X_mod, fd.a_train, fd.y_train, fd.train_cfg);
                    rec.metrics =
                        eval_metrics(*model, fd.X_test, fd.a_test, fd.y_test, cfg.dr_mode);
                    rec.dr_train = dr_dataset(*model, X_mod, cfg.dr_mode);
                    rec.metrics.data_fidelity = data_fidelity(fd.X_train, X_mod);
                    rec.metrics.training_adjustment_rate =
                        training_adjustment_rate(fd.X_train, X_mod, fd.blocks);
                    rec.modifications = n_mods;
                    rec.effective_changes = effective;
                    break;
                }
            }

            rec.test_fold_untouched = fnv_hash(fd.X_test) == test_sum_before;
            mr.folds.push_back(std::move(rec));
        }
        aggregate_method(mr, folds.size());
        report.methods.push_back(std::move(mr));
    }

    report.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

SweepReport run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    const TabularDataset ds = load_csv(cfg.dataset_path, cfg.schema);
    SweepReport report;
    report.config = cfg;

    std::vector<std::string> warnings;
    std::vector<FoldData> folds = prepare_folds(ds, cfg, nullptr, &warnings);

    for (FoldData& fd : folds) {
        SweepFold sf;
        sf.fold = fd.fold;
        sf.points = modification_sweep(fd.X_train, fd.a_train, fd.y_train, fd.X_test,
                                       fd.a_test, fd.y_test, fd.blocks, *fd.baseline,
                                       fd.train_cfg, fd.fs_cfg, cfg.sweep_points);
        report.folds.push_back(std::move(sf));
    }

    // Pointwise mean over folds; every fold has exactly sweep_points entries.
    for (std::size_t p = 0; p < cfg.sweep_points; ++p) {
        SweepPoint avg;
        double mods = 0.0, pqp_sum = 0.0;
        std::size_t pqp_n = 0;
        for (const SweepFold& sf : report.folds) {
            const SweepPoint& pt = sf.points[p];
            mods += static_cast<double>(pt.n_modifications);
            avg.accuracy += pt.accuracy;
            avg.dr += pt.dr;
            avg.dp += pt.dp;
            avg.eo += pt.eo;
            avg.dr_reduction_pct += pt.dr_reduction_pct;
            if (pt.pqp) {
                pqp_sum += *pt.pqp;
                ++pqp_n;
            }
        }
        const double k = static_cast<double>(report.folds.size());
        avg.n_modifications = static_cast<std::size_t>(std::llround(mods / k));
        avg.accuracy /= k;
        avg.dr /= k;
        avg.dp /= k;
        avg.eo /= k;
        avg.dr_reduction_pct /= k;
        if (pqp_n > 0) avg.pqp = pqp_sum / static_cast<double>(pqp_n);
        report.averaged.push_back(avg);
    }

    report.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

namespace {

ordered_json fold_to_json(const MethodFoldRecord& r) {
    ordered_json j;
    j["fold"] = r.fold;
    j["accuracy"] = r.metrics.accuracy;
    j["dr"] = r.metrics.dr;
    j["dr_train"] = r.dr_train;
    j["dp"] = r.metrics.dp;
    j["eo"] = r.metrics.eo;
    if (r.metrics.pqp) j["pqp"] = *r.metrics.pqp; else j["pqp"] = nullptr;
    j["data_fidelity"] = r.metrics.data_fidelity;
    j["training_adjustment_rate"] = r.metrics.training_adjustment_rate;
    j["modifications"] = r.modifications;
    j["effective_changes"] = r.effective_changes;
    j["test_fold_untouched"] = r.test_fold_untouched;
    if (r.metrics.epsilon) j["epsilon"] = *r.metrics.epsilon; else j["epsilon"] = nullptr;
    if (r.identity) {
        ordered_json id;
        id["instances"] = r.identity->instances;
        id["mean_abs_gap"] = r.identity->mean_abs_gap;
        id["max_abs_gap"] = r.identity->max_abs_gap;
        id["grand_coalition_instances"] = r.identity->grand_coalition_instances;
        id["max_grand_coalition_gap"] = r.identity->max_grand_coalition_gap;
        j["replacement_identity"] = id;
    } else {
        j["replacement_identity"] = nullptr;
    }
    return j;
}

ordered_json sweep_point_to_json(const SweepPoint& pt) {
    ordered_json j;
    j["n_modifications"] = pt.n_modifications;
    j["accuracy"] = pt.accuracy;
    j["dr"] = pt.dr;
    j["dp"] = pt.dp;
    j["eo"] = pt.eo;
    if (pt.pqp) j["pqp"] = *pt.pqp; else j["pqp"] = nullptr;
    j["dr_reduction_pct"] = pt.dr_reduction_pct;
    return j;
}

}  // namespace

std::string ExperimentReport::to_json(bool include_timing) const {
    ordered_json j;
    j["config"] = config_to_json(config);
    j["kfold_label_only_fallback"] = kfold_label_only_fallback;
    j["warnings"] = warnings;
    ordered_json methods_json = ordered_json::array();
    for (const MethodResult& mr : methods) {
        ordered_json mj;
        mj["method"] = method_name(mr.method);
        mj["test_adjustment_necessity"] = mr.test_adjustment_necessity;
        ordered_json folds_json = ordered_json::array();
        for (const MethodFoldRecord& r : mr.folds) folds_json.push_back(fold_to_json(r));
        mj["folds"] = folds_json;
        ordered_json agg;
        for (const auto& [name, a] : mr.aggregate) {
            ordered_json aj;
            aj["mean"] = a.mean;
            aj["sd"] = a.sd;
            aj["missing"] = a.missing;
            agg[name] = aj;
        }
        mj["aggregate"] = agg;
        methods_json.push_back(mj);
    }
    j["methods"] = methods_json;
    if (include_timing) j["timing"] = {{"total_seconds", total_seconds}};
    return j.dump(2) + "\n";
}

std::string SweepReport::to_json(bool include_timing) const {
    ordered_json j;
    j["config"] = config_to_json(config);
    ordered_json folds_json = ordered_json::array();
    for (const SweepFold& sf : folds) {
        ordered_json fj;
        fj["fold"] = sf.fold;
        ordered_json pts = ordered_json::array();
        for (const SweepPoint& pt : sf.points) pts.push_back(sweep_point_to_json(pt));
        fj["points"] = pts;
        folds_json.push_back(fj);
    }
    j["folds"] = folds_json;
    ordered_json avg = ordered_json::array();
    for (const SweepPoint& pt : averaged) avg.push_back(sweep_point_to_json(pt));
    j["averaged"] = avg;
    if (include_timing) j["timing"] = {{"total_seconds", total_seconds}};
    return j.dump(2) + "\n";
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
}

std::string json_num(const ordered_json& v) {
    if (v.is_null()) return "";
    return format_g(v.get<double>());
}

void render_experiment_csv(const ordered_json& j, const std::string& out_dir) {
    std::ostringstream metrics;
    metrics << "method,fold,accuracy,dr,dr_train,dp,eo,pqp,data_fidelity,"
               "training_adjustment_rate,modifications,test_adjustment_necessity\n";
    std::ostringstream agg;
    agg << "method,metric,mean,sd,missing\n";
    for (const auto& mj : j.at("methods")) {
        const std::string name = mj.at("method").get<std::string>();
        for (const auto& fj : mj.at("folds")) {
            metrics << name << ',' << fj.at("fold").get<std::size_t>() << ','
                    << json_num(fj.at("accuracy")) << ',' << json_num(fj.at("dr")) << ','
                    << json_num(fj.at("dr_train")) << ',' << json_num(fj.at("dp")) << ','
                    << json_num(fj.at("eo")) << ',' << json_num(fj.at("pqp")) << ','
                    << json_num(fj.at("data_fidelity")) << ','
                    << json_num(fj.at("training_adjustment_rate")) << ','
                    << fj.at("modifications").get<std::size_t>() << ','
                    << (mj.at("test_adjustment_necessity").get<bool>() ? "yes" : "no")
                    << '\n';
        }
        for (const auto& [metric, aj] : mj.at("aggregate").items()) {
            agg << name << ',' << metric << ',' << json_num(aj.at("mean")) << ','
                << json_num(aj.at("sd")) << ',' << aj.at("missing").get<std::size_t>()
                << '\n';
        }
    }
    write_file(out_dir + "/metrics.csv", metrics.str());
    write_file(out_dir + "/aggregate.csv", agg.str());
}

void render_sweep_csv(const ordered_json& j, const std::string& out_dir) {
    std::ostringstream avg;
    avg << "n_modifications,accuracy,dr,dp,eo,pqp,dr_reduction_pct\n";
    for (const auto& pj : j.at("averaged")) {
        avg << pj.at("n_modifications").get<std::size_t>() << ','
            << json_num(pj.at("accuracy")) << ',' << json_num(pj.at("dr")) << ','
            << json_num(pj.at("dp")) << ',' << json_num(pj.at("eo")) << ','
            << json_num(pj.at("pqp")) << ',' << json_num(pj.at("dr_reduction_pct"))
            << '\n';
    }
    std::ostringstream per_fold;
    per_fold << "fold,point,n_modifications,accuracy,dr,dp,eo,pqp,dr_reduction_pct\n";
    for (const auto& fj : j.at("folds")) {
        std::size_t p = 0;
        for (const auto& pj : fj.at("points")) {
            per_fold << fj.at("fold").get<std::size_t>() << ',' << p++ << ','
                     << pj.at("n_modifications").get<std::size_t>() << ','
                     << json_num(pj.at("accuracy")) << ',' << json_num(pj.at("dr")) << ','
                     << json_num(pj.at("dp")) << ',' << json_num(pj.at("eo")) << ','
                     << json_num(pj.at("pqp")) << ','
                     << json_num(pj.at("dr_reduction_pct")) << '\n';
        }
    }
    write_file(out_dir + "/sweep.csv", avg.str());
    write_file(out_dir + "/sweep_folds.csv", per_fold.str());
}

}  // namespace

void write_experiment_csv(const ExperimentReport& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    render_experiment_csv(ordered_json::parse(report.to_json()), out_dir);
}

void write_sweep_csv(const SweepReport& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    render_sweep_csv(ordered_json::parse(report.to_json()), out_dir);
}

void render_report_json(const std::string& json_path, const std::string& out_dir) {
    std::ifstream in(json_path);
    if (!in) throw Error("cannot open report '" + json_path + "'");
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw Error("report '" + json_path + "' is not valid JSON: " + e.what());
    }
    std::filesystem::create_directories(out_dir);
    if (j.contains("methods")) {
        render_experiment_csv(j, out_dir);
    } else if (j.contains("averaged")) {
        render_sweep_csv(j, out_dir);
    } else {
        throw Error("report '" + json_path + "' has neither methods nor sweep content");
    }
}

}  // namespace fairshap
