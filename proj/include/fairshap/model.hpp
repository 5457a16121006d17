#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fairshap/matrix.hpp"

namespace fairshap {

enum class ModelKind { logistic, boosted_stumps, rule_table };

struct TrainConfig {
    ModelKind kind = ModelKind::logistic;
    double learning_rate = 0.5;   // GD step size / boosting shrinkage
    std::size_t iterations = 500; // GD iteration cap
    double l2_penalty = 1e-3;     // ridge strength; stump leaves reuse it as their
                                  // denominator regularizer (intercept exempt)
    std::size_t tree_count = 150; // boosted stumps only
    std::uint64_t seed = 0;

    void validate() const;
};

// Probabilistic binary classifier over an encoded feature vector plus the
// sensitive attribute as an explicit final input, so that predictions with
// the attribute toggled are well defined.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual double predict_probability(std::span<const double> x, double a) const = 0;
    virtual ModelKind kind() const = 0;
    virtual std::uint64_t seed() const = 0;
    virtual std::size_t n_features() const = 0;  // excluding the sensitive input
    virtual void save(std::ostream& out) const = 0;
};

int predict_label(const Predictor& f, std::span<const double> x, double a,
                  double threshold = 0.5);

// X excludes the sensitive attribute; `a` is appended internally as the last
// model input. Training is deterministic given the config.
std::unique_ptr<Predictor> train_model(const Matrix& X, const std::vector<int>& a,
                                       const std::vector<int>& y, const TrainConfig& cfg);

std::unique_ptr<Predictor> load_model(std::istream& in);
std::unique_ptr<Predictor> load_model_file(const std::string& path);
void save_model_file(const Predictor& f, const std::string& path);

// Fixed-coefficient linear model (no training); useful for closed-form
// checks and the verification suites.
std::unique_ptr<Predictor> make_logistic_predictor(std::vector<double> w, double w_a,
                                                   double bias);

// Deterministic indicator model: thresholds bucket each input, the bucket
// pattern plus the sensitive bit index a 0/1 table. Output is exactly 0 or 1.
std::unique_ptr<Predictor> make_rule_predictor(std::vector<double> thresholds,
                                               std::vector<std::uint8_t> table);

}  // namespace fairshap
