#include "fairshap/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace fairshap {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string fmt(double v) {
    char buf[32];
    snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_training_inputs(const Matrix& X, const std::vector<int>& a,
                           const std::vector<int>& y) {
    if (X.rows() == 0) throw Error("train: no rows");
    if (a.size() != X.rows()) throw Error("train: sensitive vector length mismatch");
    if (y.size() != X.rows()) throw Error("train: label vector length mismatch");
    const bool has0 = std::count(y.begin(), y.end(), 0) > 0;
    const bool has1 = std::count(y.begin(), y.end(), 1) > 0;
    if (!has0 || !has1) throw Error("train: labels are constant; both classes required");
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (double v : X.row(i))
            if (!std::isfinite(v)) throw Error("train: non-finite feature value");
}

class LogisticModel final : public Predictor {
public:
    std::vector<double> w;  // per feature
    double w_a = 0.0;       // sensitive attribute weight
    double bias = 0.0;
    std::uint64_t seed_ = 0;

    double predict_probability(std::span<const double> x, double a) const override {
        if (x.size() != w.size())
            throw Error("predict: expected " + std::to_string(w.size()) + " features, got " +
                        std::to_string(x.size()));
        double z = bias + w_a * a;
        for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * x[j];
        return sigmoid(z);
    }
    ModelKind kind() const override { return ModelKind::logistic; }
    std::uint64_t seed() const override { return seed_; }
    std::size_t n_features() const override { return w.size(); }

    void save(std::ostream& out) const override {
        out << "kind=logistic\n";
        out << "seed=" << seed_ << "\n";
        out << "n_features=" << w.size() << "\n";
        out << "bias=" << fmt(bias) << "\n";
        out << "w_a=" << fmt(w_a) << "\n";
        for (std::size_t j = 0; j < w.size(); ++j)
            out << "w" << j << "=" << fmt(w[j]) << "\n";
    }
};

struct Stump {
    std::size_t feature = 0;  // index into [features..., sensitive]
    double threshold = 0.0;
    double left = 0.0;   // value when x[feature] < threshold
    double right = 0.0;  // value when x[feature] >= threshold
};

class BoostedStumpsModel final : public Predictor {
public:
    double base_score = 0.0;  // log-odds of the base rate
    double shrinkage = 0.3;
    std::vector<Stump> stumps;
    std::size_t n_features_ = 0;  // excluding sensitive input
    std::uint64_t seed_ = 0;

    double logit(std::span<const double> x, double a) const {
        double z = base_score;
        for (const Stump& s : stumps) {
            const double v = s.feature < n_features_ ? x[s.feature] : a;
            z += shrinkage * (v < s.threshold ? s.left : s.right);
        }
        return z;
    }

    double predict_probability(std::span<const double> x, double a) const override {
        if (x.size() != n_features_)
            throw Error("predict: expected " + std::to_string(n_features_) +
                        " features, got " + std::to_string(x.size()));
        return sigmoid(logit(x, a));
    }
    ModelKind kind() const override { return ModelKind::boosted_stumps; }
    std::uint64_t seed() const override { return seed_; }
    std::size_t n_features() const override { return n_features_; }

    void save(std::ostream& out) const override {
        out << "kind=boosted_stumps\n";
        out << "seed=" << seed_ << "\n";
        out << "n_features=" << n_features_ << "\n";
        out << "base_score=" << fmt(base_score) << "\n";
        out << "shrinkage=" << fmt(shrinkage) << "\n";
        out << "tree_count=" << stumps.size() << "\n";
        for (std::size_t t = 0; t < stumps.size(); ++t) {
            const Stump& s = stumps[t];
            out << "tree" << t << "=" << s.feature << " " << fmt(s.threshold) << " "
                << fmt(s.left) << " " << fmt(s.right) << "\n";
        }
    }
};

class RuleModel final : public Predictor {
public:
    std::vector<double> thresholds;
    std::vector<std::uint8_t> table;  // 2^(d+1) entries

    double predict_probability(std::span<const double> x, double a) const override {
        if (x.size() != thresholds.size())
            throw Error("predict: expected " + std::to_string(thresholds.size()) +
                        " features, got " + std::to_string(x.size()));
        std::size_t idx = 0;
        for (std::size_t j = 0; j < thresholds.size(); ++j)
            if (x[j] >= thresholds[j]) idx |= 1u << j;
        if (a >= 0.5) idx |= 1u << thresholds.size();
        return table[idx] ? 1.0 : 0.0;
    }
    ModelKind kind() const override { return ModelKind::rule_table; }
    std::uint64_t seed() const override { return 0; }
    std::size_t n_features() const override { return thresholds.size(); }

    void save(std::ostream& out) const override {
        out << "kind=rule_table\n";
        out << "n_features=" << thresholds.size() << "\n";
        for (std::size_t j = 0; j < thresholds.size(); ++j)
            out << "t" << j << "=" << fmt(thresholds[j]) << "\n";
        out << "table=";
        for (std::uint8_t b : table) out << (b ? '1' : '0');
        out << "\n";
    }
};

std::unique_ptr<Predictor> train_logistic(const Matrix& X, const std::vector<int>& a,
                                          const std::vector<int>& y, const TrainConfig& cfg) {
    const std::size_t n = X.rows(), d = X.cols();
    auto model = std::make_unique<LogisticModel>();
    model->w.assign(d, 0.0);
    model->seed_ = cfg.seed;

    std::vector<double> grad(d + 2, 0.0);  // [w..., w_a, bias]
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto xi = X.row(i);
            double z = model->bias + model->w_a * a[i];
            for (std::size_t j = 0; j < d; ++j) z += model->w[j] * xi[j];
            const double p = sigmoid(z);
            const double r = p - y[i];
            loss += y[i] ? -std::log(std::max(p, 1e-300))
                         : -std::log(std::max(1.0 - p, 1e-300));
            for (std::size_t j = 0; j < d; ++j) grad[j] += r * xi[j];
            grad[d] += r * a[i];
            grad[d + 1] += r;
        }
        loss /= static_cast<double>(n);
        double gnorm2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            grad[j] = grad[j] / static_cast<double>(n) + cfg.l2_penalty * model->w[j];
            loss += 0.5 * cfg.l2_penalty * model->w[j] * model->w[j];
        }
        grad[d] = grad[d] / static_cast<double>(n) + cfg.l2_penalty * model->w_a;
        loss += 0.5 * cfg.l2_penalty * model->w_a * model->w_a;
        grad[d + 1] /= static_cast<double>(n);
        for (double g : grad) gnorm2 += g * g;
        if (!std::isfinite(loss))
            throw Error("train_logistic: loss diverged at iteration " + std::to_string(it));
        if (std::sqrt(gnorm2) <= 1e-6) break;
        for (std::size_t j = 0; j < d; ++j) model->w[j] -= cfg.learning_rate * grad[j];
        model->w_a -= cfg.learning_rate * grad[d];
        model->bias -= cfg.learning_rate * grad[d + 1];
    }
    return model;
}

// One boosting round: least-squares fit of a depth-1 tree to the gradient
// residuals, leaf values by a damped Newton step.
struct StumpFit {
    Stump stump;
    double gain = 0.0;
    bool found = false;
};

StumpFit fit_stump(const std::vector<std::vector<std::size_t>>& order,
                   const std::vector<std::vector<double>>& col,
                   const std::vector<double>& g, const std::vector<double>& h,
                   double lambda) {
    const std::size_t n = g.size();
    double g_tot = 0.0, h_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        g_tot += g[i];
        h_tot += h[i];
    }
    const double score_root = g_tot * g_tot / (h_tot + lambda);

    StumpFit best;
    for (std::size_t f = 0; f < col.size(); ++f) {
        const auto& ord = order[f];
        const auto& v = col[f];
        double g_left = 0.0, h_left = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            const std::size_t i = ord[p];
            g_left += g[i];
            h_left += h[i];
            if (v[ord[p + 1]] == v[i]) continue;  // no split between equal values
            const double g_right = g_tot - g_left, h_right = h_tot - h_left;
            const double score = g_left * g_left / (h_left + lambda) +
                                 g_right * g_right / (h_right + lambda);
            const double gain = score - score_root;
            if (!best.found || gain > best.gain + 1e-15) {
                best.found = true;
                best.gain = gain;
                best.stump.feature = f;
                best.stump.threshold = 0.5 * (v[i] + v[ord[p + 1]]);
                best.stump.left = -g_left / (h_left + lambda);
                best.stump.right = -g_right / (h_right + lambda);
            }
        }
    }
    return best;
}

std::unique_ptr<Predictor> train_boosted_stumps(const Matrix& X, const std::vector<int>& a,
                                                const std::vector<int>& y,
                                                const TrainConfig& cfg) {
    const std::size_t n = X.rows(), d = X.cols();
    auto model = std::make_unique<BoostedStumpsModel>();
    model->n_features_ = d;
    model->seed_ = cfg.seed;
    model->shrinkage = cfg.learning_rate;

    const double pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
    const double p0 = std::clamp(pos / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
    model->base_score = std::log(p0 / (1.0 - p0));

    // Column copies including the sensitive input as the last column, with
    // per-column sort orders computed once.
    std::vector<std::vector<double>> col(d + 1, std::vector<double>(n));
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < n; ++i) col[j][i] = X(i, j);
    for (std::size_t i = 0; i < n; ++i) col[d][i] = a[i];
    std::vector<std::vector<std::size_t>> order(d + 1);
    for (std::size_t j = 0; j <= d; ++j) {
        order[j].resize(n);
        std::iota(order[j].begin(), order[j].end(), 0);
        std::stable_sort(order[j].begin(), order[j].end(),
                         [&](std::size_t p, std::size_t q) { return col[j][p] < col[j][q]; });
    }

    std::vector<double> z(n, model->base_score);
    std::vector<double> g(n), h(n);
    for (std::size_t round = 0; round < cfg.tree_count; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(z[i]);
            g[i] = p - y[i];
            h[i] = std::max(p * (1.0 - p), 1e-12);
        }
        StumpFit fit = fit_stump(order, col, g, h, std::max(cfg.l2_penalty, 1e-6));
        if (!fit.found || fit.gain <= 1e-12) break;
        fit.stump.left = std::clamp(fit.stump.left, -4.0, 4.0);
        fit.stump.right = std::clamp(fit.stump.right, -4.0, 4.0);
        model->stumps.push_back(fit.stump);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = col[fit.stump.feature][i];
            z[i] += model->shrinkage *
                    (v < fit.stump.threshold ? fit.stump.left : fit.stump.right);
            if (!std::isfinite(z[i]))
                throw Error("train_boosted_stumps: score diverged at round " +
                            std::to_string(round));
        }
    }
    return model;
}

}  // namespace

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw Error("train config: learning_rate must be positive");
    if (kind == ModelKind::logistic && iterations == 0)
        throw Error("train config: iterations must be positive");
    if (l2_penalty < 0.0) throw Error("train config: l2_penalty must be nonnegative");
}

int predict_label(const Predictor& f, std::span<const double> x, double a, double threshold) {
    return f.predict_probability(x, a) >= threshold ? 1 : 0;
}

std::unique_ptr<Predictor> train_model(const Matrix& X, const std::vector<int>& a,
                                       const std::vector<int>& y, const TrainConfig& cfg) {
    cfg.validate();
    check_training_inputs(X, a, y);
    if (cfg.kind == ModelKind::logistic) return train_logistic(X, a, y, cfg);
    if (cfg.kind == ModelKind::boosted_stumps) return train_boosted_stumps(X, a, y, cfg);
    throw Error("train_model: rule_table models are fixed, not trainable");
}

namespace {

std::map<std::string, std::string> read_kv(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("model file: malformed line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

const std::string& need(const std::map<std::string, std::string>& kv, const std::string& k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw Error("model file: missing key '" + k + "'");
    return it->second;
}

}  // namespace

std::unique_ptr<Predictor> load_model(std::istream& in) {
    const auto kv = read_kv(in);
    const std::string& kind = need(kv, "kind");
    if (kind == "logistic") {
        auto m = std::make_unique<LogisticModel>();
        m->seed_ = std::stoull(need(kv, "seed"));
        const std::size_t d = std::stoul(need(kv, "n_features"));
        m->bias = std::stod(need(kv, "bias"));
        m->w_a = std::stod(need(kv, "w_a"));
        m->w.resize(d);
        for (std::size_t j = 0; j < d; ++j) m->w[j] = std::stod(need(kv, "w" + std::to_string(j)));
        return m;
    }
    if (kind == "rule_table") {
        auto m = std::make_unique<RuleModel>();
        const std::size_t d = std::stoul(need(kv, "n_features"));
        m->thresholds.resize(d);
        for (std::size_t j = 0; j < d; ++j)
            m->thresholds[j] = std::stod(need(kv, "t" + std::to_string(j)));
        const std::string& bits = need(kv, "table");
        if (bits.size() != (std::size_t{1} << (d + 1)))
            throw Error("model file: rule table has wrong size");
        for (char c : bits) m->table.push_back(c == '1' ? 1 : 0);
        return m;
    }
    if (kind == "boosted_stumps") {
        auto m = std::make_unique<BoostedStumpsModel>();
        m->seed_ = std::stoull(need(kv, "seed"));
        m->n_features_ = std::stoul(need(kv, "n_features"));
        m->base_score = std::stod(need(kv, "base_score"));
        m->shrinkage = std::stod(need(kv, "shrinkage"));
        const std::size_t t = std::stoul(need(kv, "tree_count"));
        m->stumps.resize(t);
        for (std::size_t i = 0; i < t; ++i) {
            std::istringstream ss(need(kv, "tree" + std::to_string(i)));
            Stump s;
            if (!(ss >> s.feature >> s.threshold >> s.left >> s.right))
                throw Error("model file: malformed tree" + std::to_string(i));
            m->stumps[i] = s;
        }
        return m;
    }
    throw Error("model file: unknown kind '" + kind + "'");
}

std::unique_ptr<Predictor> make_logistic_predictor(std::vector<double> w, double w_a,
                                                   double bias) {
    auto m = std::make_unique<LogisticModel>();
    m->w = std::move(w);
    m->w_a = w_a;
    m->bias = bias;
    return m;
}

std::unique_ptr<Predictor> make_rule_predictor(std::vector<double> thresholds,
                                               std::vector<std::uint8_t> table) {
    if (thresholds.size() > 20) throw Error("make_rule_predictor: too many features");
    if (table.size() != (std::size_t{1} << (thresholds.size() + 1)))
        throw Error("make_rule_predictor: table must have 2^(d+1) entries");
    auto m = std::make_unique<RuleModel>();
    m->thresholds = std::move(thresholds);
    m->table = std::move(table);
    return m;
}

std::unique_ptr<Predictor> load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file '" + path + "'");
    return load_model(in);
}

void save_model_file(const Predictor& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model file '" + path + "'");
    f.save(out);
}

}  // namespace fairshap
