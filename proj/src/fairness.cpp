#include "fairshap/fairness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace fairshap {

double dr_instance(const Predictor& f, std::span<const double> x, DrMode mode) {
    const double p0 = f.predict_probability(x, 0.0);
    const double p1 = f.predict_probability(x, 1.0);
    if (mode == DrMode::probability) return std::abs(p0 - p1);
    return std::abs((p0 >= 0.5 ? 1.0 : 0.0) - (p1 >= 0.5 ? 1.0 : 0.0));
}

double dr_dataset(const Predictor& f, const Matrix& X, DrMode mode) {
    if (X.rows() == 0) throw Error("dr_dataset: empty matrix");
    double s = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) s += dr_instance(f, X.row(i), mode);
    return s / static_cast<double>(X.rows());
}

namespace {

void check_rows(const Matrix& X, const std::vector<int>& a, const std::vector<int>* y) {
    if (X.rows() == 0) throw Error("metric: empty matrix");
    if (a.size() != X.rows()) throw Error("metric: sensitive vector length mismatch");
    if (y && y->size() != X.rows()) throw Error("metric: label vector length mismatch");
}

struct GroupCounts {
    double n = 0, pred_pos = 0, actual_pos = 0, true_pos = 0;
};

std::array<GroupCounts, 2> tally(const Predictor& f, const Matrix& X,
                                 const std::vector<int>& a, const std::vector<int>* y) {
    std::array<GroupCounts, 2> g{};
    for (std::size_t i = 0; i < X.rows(); ++i) {
        GroupCounts& c = g[a[i] ? 1 : 0];
        c.n += 1;
        const int yhat = predict_label(f, X.row(i), a[i]);
        c.pred_pos += yhat;
        if (y) {
            c.actual_pos += (*y)[i];
            if ((*y)[i] && yhat) c.true_pos += 1;
        }
    }
    return g;
}

}  // namespace

double accuracy(const Predictor& f, const Matrix& X, const std::vector<int>& a,
                const std::vector<int>& y) {
    check_rows(X, a, &y);
    double correct = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i)
        if (predict_label(f, X.row(i), a[i]) == y[i]) correct += 1;
    return correct / static_cast<double>(X.rows());
}

double demographic_parity(const Predictor& f, const Matrix& X, const std::vector<int>& a) {
    check_rows(X, a, nullptr);
    const auto g = tally(f, X, a, nullptr);
    if (g[0].n == 0 || g[1].n == 0)
        throw Error("demographic_parity: one sensitive group is empty");
    return std::abs(g[0].pred_pos / g[0].n - g[1].pred_pos / g[1].n);
}

double equality_of_opportunity(const Predictor& f, const Matrix& X,
                               const std::vector<int>& a, const std::vector<int>& y) {
    check_rows(X, a, &y);
    const auto g = tally(f, X, a, &y);
    if (g[0].actual_pos == 0 || g[1].actual_pos == 0)
        throw Error("equality_of_opportunity: a group has no positive labels");
    return std::abs(g[0].true_pos / g[0].actual_pos - g[1].true_pos / g[1].actual_pos);
}

double predictive_quality_parity(const Predictor& f, const Matrix& X,
                                 const std::vector<int>& a, const std::vector<int>& y) {
    check_rows(X, a, &y);
    const auto g = tally(f, X, a, &y);
    if (g[0].pred_pos == 0 || g[1].pred_pos == 0)
        throw MetricUndefined(
            "predictive_quality_parity: a group has no positive predictions");
    return std::abs(g[0].true_pos / g[0].pred_pos - g[1].true_pos / g[1].pred_pos);
}

double wasserstein_1d(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw Error("wasserstein_1d: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n = a.size(), m = b.size();

    // Integrate |F_a^{-1}(q) - F_b^{-1}(q)| over q in (0,1); the quantile
    // functions are step functions with breakpoints at i/n and j/m.
    double dist = 0.0, q = 0.0;
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        const double qa = static_cast<double>(i + 1) / static_cast<double>(n);
        const double qb = static_cast<double>(j + 1) / static_cast<double>(m);
        const double q_next = std::min(qa, qb);
        dist += (q_next - q) * std::abs(a[i] - b[j]);
        q = q_next;
        if (qa <= q_next) ++i;
        if (qb <= q_next) ++j;
    }
    return dist;
}

double data_fidelity(const Matrix& original, const Matrix& modified) {
    if (original.rows() != modified.rows() || original.cols() != modified.cols())
        throw Error("data_fidelity: shape mismatch");
    if (original.rows() == 0) throw Error("data_fidelity: empty matrix");
    double total = 0.0;
    std::vector<double> col_a(original.rows()), col_b(original.rows());
    for (std::size_t c = 0; c < original.cols(); ++c) {
        for (std::size_t r = 0; r < original.rows(); ++r) {
            col_a[r] = original(r, c);
            col_b[r] = modified(r, c);
        }
        total += wasserstein_1d(col_a, col_b);
    }
    return total / static_cast<double>(original.cols());
}

double training_adjustment_rate(const Matrix& original, const Matrix& modified,
                                std::span<const RawBlock> blocks) {
    if (original.rows() != modified.rows() || original.cols() != modified.cols())
        throw Error("training_adjustment_rate: shape mismatch");
    if (original.rows() == 0 || blocks.empty())
        throw Error("training_adjustment_rate: empty input");
    std::size_t changed = 0;
    for (std::size_t r = 0; r < original.rows(); ++r) {
        for (const RawBlock& blk : blocks) {
            for (std::size_t c = blk.begin; c < blk.end; ++c) {
                if (original(r, c) != modified(r, c)) {
                    ++changed;
                    break;
                }
            }
        }
    }
    return static_cast<double>(changed) /
           static_cast<double>(original.rows() * blocks.size());
}

double tv_distance_discrete(const Matrix& d0, const Matrix& d1, const BinningSpec& spec) {
    if (d0.cols() != d1.cols()) throw Error("tv_distance_discrete: width mismatch");
    if (spec.columns.size() != d0.cols())
        throw Error("tv_distance_discrete: binning spec does not cover all columns");
    if (d0.rows() == 0 || d1.rows() == 0) throw Error("tv_distance_discrete: empty group");

    auto bin_row = [&](const Matrix& m, std::size_t r) {
        std::vector<std::size_t> key(m.cols());
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const ColumnBinning& cb = spec.columns[c];
            if (cb.categorical) {
                key[c] = static_cast<std::size_t>(std::llround(m(r, c)));
            } else {
                if (cb.width <= 0.0 || cb.bins == 0)
                    throw Error("tv_distance_discrete: invalid numeric binning");
                const double pos = (m(r, c) - cb.lo) / cb.width;
                const long long b = static_cast<long long>(std::floor(pos));
                key[c] = static_cast<std::size_t>(
                    std::clamp<long long>(b, 0, static_cast<long long>(cb.bins) - 1));
            }
        }
        return key;
    };

    std::map<std::vector<std::size_t>, std::pair<double, double>> hist;
    for (std::size_t r = 0; r < d0.rows(); ++r) hist[bin_row(d0, r)].first += 1;
    for (std::size_t r = 0; r < d1.rows(); ++r) hist[bin_row(d1, r)].second += 1;

    double tv = 0.0;
    for (const auto& [key, counts] : hist)
        tv += std::abs(counts.first / static_cast<double>(d0.rows()) -
                       counts.second / static_cast<double>(d1.rows()));
    return 0.5 * tv;
}

}  // namespace fairshap
