#include "fairshap/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace fairshap {

std::string method_name(Method m) {
    switch (m) {
        case Method::none: return "none";
        case Method::fairshap: return "fairshap";
        case Method::correlation_remover: return "correlation_remover";
        case Method::disparate_impact_remover: return "disparate_impact_remover";
        case Method::ablation_random: return "ablation_random";
        case Method::ablation_match_random: return "ablation_match_random";
    }
    throw Error("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
    for (Method m : {Method::none, Method::fairshap, Method::correlation_remover,
                     Method::disparate_impact_remover, Method::ablation_random,
                     Method::ablation_match_random})
        if (method_name(m) == name) return m;
    throw Error("unknown method '" + name + "'");
}

void ExperimentConfig::validate() const {
    if (dataset_path.empty()) throw Error("config: dataset path is missing");
    schema.validate();
    model.validate();
    fairshap.validate();
    if (methods.empty()) throw Error("config: methods list is empty");
    if (folds < 2) throw Error("config: folds must be at least 2");
    if (sweep_points < 2) throw Error("config: sweep_points must be at least 2");
    if (cr_alpha < 0.0 || cr_alpha > 1.0) throw Error("config: cr_alpha must be in [0, 1]");
    if (dir_repair_level < 0.0 || dir_repair_level > 1.0)
        throw Error("config: dir_repair_level must be in [0, 1]");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw Error("config: key '" + key + "' expects a number, got '" + v + "'");
    }
}

std::uint64_t parse_uint(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const unsigned long long u = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        throw Error("config: key '" + key + "' expects a nonnegative integer, got '" + v +
                    "'");
    }
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
    if (v == "off" || v == "false" || v == "no" || v == "0") return false;
    throw Error("config: key '" + key + "' expects on/off, got '" + v + "'");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::string section;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto cut = line.find_first_of(";#");
        if (cut != std::string::npos) line = line.substr(0, cut);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error("config line " + std::to_string(line_no) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("config line " + std::to_string(line_no) + ": expected key = value");
        if (section.empty())
            throw Error("config line " + std::to_string(line_no) + ": key outside a section");
        sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    ExperimentConfig cfg;
    std::vector<std::string> numeric, categorical;

    for (const auto& [sec, kv] : sections) {
        for (const auto& [key, value] : kv) {
            if (sec == "dataset") {
                if (key == "path") cfg.dataset_path = value;
                else if (key == "numeric_features") numeric = split_list(value);
                else if (key == "categorical_features") categorical = split_list(value);
                else if (key == "label") cfg.schema.label_name = value;
                else if (key == "label_positive") {
                    cfg.schema.label_positive_values.clear();
                    for (const auto& v : split_list(value))
                        cfg.schema.label_positive_values.insert(v);
                } else if (key == "sensitive") cfg.schema.sensitive_name = value;
                else if (key == "sensitive_positive") {
                    cfg.schema.sensitive_positive_values.clear();
                    for (const auto& v : split_list(value))
                        cfg.schema.sensitive_positive_values.insert(v);
                } else throw Error("config: unknown key '" + key + "' in section [dataset]");
            } else if (sec == "model") {
                if (key == "kind") {
                    if (value == "logistic") cfg.model.kind = ModelKind::logistic;
                    else if (value == "boosted_stumps") cfg.model.kind = ModelKind::boosted_stumps;
                    else throw Error("config: unknown model kind '" + value + "'");
                } else if (key == "learning_rate") cfg.model.learning_rate = parse_double(value, key);
                else if (key == "iterations") cfg.model.iterations = parse_uint(value, key);
                else if (key == "l2_penalty") cfg.model.l2_penalty = parse_double(value, key);
                else if (key == "tree_count") cfg.model.tree_count = parse_uint(value, key);
                else throw Error("config: unknown key '" + key + "' in section [model]");
            } else if (sec == "fairshap") {
                if (key == "threshold") cfg.fairshap.threshold = parse_double(value, key);
                else if (key == "threshold_mode") {
                    if (value == "signed") cfg.fairshap.threshold_mode = ThresholdMode::signed_contribution;
                    else if (value == "absolute") cfg.fairshap.threshold_mode = ThresholdMode::absolute;
                    else throw Error("config: unknown threshold_mode '" + value + "'");
                } else if (key == "matcher") {
                    if (value == "nearest_neighbour") cfg.fairshap.matcher = MatchMethod::nearest_neighbour;
                    else if (value == "optimal_transport") cfg.fairshap.matcher = MatchMethod::optimal_transport;
                    else throw Error("config: unknown matcher '" + value + "'");
                } else if (key == "estimator") {
                    if (value == "auto") cfg.fairshap.estimator.mode = EstimatorConfig::Mode::automatic;
                    else if (value == "exact") cfg.fairshap.estimator.mode = EstimatorConfig::Mode::exact;
                    else if (value == "sampled") cfg.fairshap.estimator.mode = EstimatorConfig::Mode::sampled;
                    else throw Error("config: unknown estimator '" + value + "'");
                } else if (key == "permutations") cfg.fairshap.estimator.permutations = parse_uint(value, key);
                else if (key == "epsilon") cfg.fairshap.sinkhorn.epsilon = parse_double(value, key);
                else if (key == "sinkhorn_max_iters") cfg.fairshap.sinkhorn.max_iters = parse_uint(value, key);
                else if (key == "sinkhorn_tol") cfg.fairshap.sinkhorn.tol = parse_double(value, key);
                else throw Error("config: unknown key '" + key + "' in section [fairshap]");
            } else if (sec == "baselines") {
                if (key == "cr_alpha") cfg.cr_alpha = parse_double(value, key);
                else if (key == "dir_repair_level") cfg.dir_repair_level = parse_double(value, key);
                else throw Error("config: unknown key '" + key + "' in section [baselines]");
            } else if (sec == "experiment") {
                if (key == "methods") {
                    cfg.methods.clear();
                    for (const auto& m : split_list(value)) cfg.methods.push_back(method_from_name(m));
                } else if (key == "folds") cfg.folds = parse_uint(value, key);
                else if (key == "seed") cfg.seed = parse_uint(value, key);
                else if (key == "out_dir") cfg.out_dir = value;
                else if (key == "sweep") cfg.sweep_enabled = parse_bool(value, key);
                else if (key == "sweep_points") cfg.sweep_points = parse_uint(value, key);
                else if (key == "dr_mode") {
                    if (value == "probability") cfg.dr_mode = DrMode::probability;
                    else if (value == "label") cfg.dr_mode = DrMode::label;
                    else throw Error("config: unknown dr_mode '" + value + "'");
                } else throw Error("config: unknown key '" + key + "' in section [experiment]");
            } else {
                throw Error("config: unknown section [" + sec + "]");
            }
        }
    }

    for (const auto& n : numeric) {
        cfg.schema.feature_names.push_back(n);
        cfg.schema.feature_kinds.push_back(FeatureKind::numeric);
    }
    for (const auto& c : categorical) {
        cfg.schema.feature_names.push_back(c);
        cfg.schema.feature_kinds.push_back(FeatureKind::categorical);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace fairshap
