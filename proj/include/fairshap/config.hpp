#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairshap/dataset.hpp"
#include "fairshap/fairness.hpp"
#include "fairshap/fairshap.hpp"
#include "fairshap/model.hpp"

namespace fairshap {

enum class Method {
    none,
    fairshap,
    correlation_remover,
    disparate_impact_remover,
    ablation_random,
    ablation_match_random,
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct ExperimentConfig {
    std::string dataset_path;
    FeatureSchema schema;

    TrainConfig model;
    FairshapConfig fairshap;
    DrMode dr_mode = DrMode::probability;

    std::vector<Method> methods{Method::none};
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    std::string out_dir = "out";

    bool sweep_enabled = false;
    std::size_t sweep_points = 9;

    double cr_alpha = 1.0;
    double dir_repair_level = 1.0;

    void validate() const;
};

// INI-style file: [section] headers, key = value lines, '#' or ';' comments.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

}  // namespace fairshap
