#include "fairshap/matching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace fairshap {

namespace {

void check_groups(const Matrix& G, const Matrix& G_other) {
    if (G.rows() == 0 || G_other.rows() == 0)
        throw Error("matching: both groups must be non-empty");
    if (G.cols() != G_other.cols())
        throw Error("matching: groups have different widths");
    for (const Matrix* m : {&G, &G_other})
        for (std::size_t i = 0; i < m->rows(); ++i)
            for (double v : m->row(i))
                if (!std::isfinite(v)) throw Error("matching: non-finite feature value");
}

Matrix cost_matrix(const Matrix& G, const Matrix& G_other) {
    Matrix C(G.rows(), G_other.rows());
    for (std::size_t i = 0; i < G.rows(); ++i)
        for (std::size_t j = 0; j < G_other.rows(); ++j)
            C(i, j) = squared_distance(G.row(i), G_other.row(j));
    return C;
}

double log_sum_exp(const std::vector<double>& v) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : v) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

}  // namespace

void MatchingPlan::validate() const {
    const std::size_t n = plan.rows(), m = plan.cols();
    if (n == 0 || m == 0) throw Error("matching plan: empty");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double p = plan(i, j);
            if (p < 0.0) throw Error("matching plan: negative mass");
            total += p;
        }
    if (std::abs(total - 1.0) > 1e-9)
        throw Error("matching plan: total mass deviates from 1");
}

MatchingPlan nearest_neighbor_match(const Matrix& G, const Matrix& G_other) {
    check_groups(G, G_other);
    const std::size_t n = G.rows(), m = G_other.rows();
    MatchingPlan mp;
    mp.method = MatchMethod::nearest_neighbour;
    mp.plan = Matrix(n, m);
    const double mass = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) {
            const double d = squared_distance(G.row(i), G_other.row(j));
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        mp.plan(i, best) = mass;
    }
    return mp;
}

double default_sinkhorn_epsilon(const Matrix& G, const Matrix& G_other) {
    check_groups(G, G_other);
    const Matrix C = cost_matrix(G, G_other);
    double s = 0.0;
    for (double v : C.data()) s += v;
    const double mean = s / static_cast<double>(C.rows() * C.cols());
    return std::max(0.05 * mean, 1e-12);
}

MatchingPlan sinkhorn_ot_match(const Matrix& G, const Matrix& G_other,
                               const SinkhornOptions& opt,
                               std::vector<double>* objective_trace) {
    check_groups(G, G_other);
    if (opt.epsilon <= 0.0) throw Error("sinkhorn: epsilon must be positive");
    if (opt.tol <= 0.0) throw Error("sinkhorn: tol must be positive");

    const std::size_t n = G.rows(), m = G_other.rows();
    const Matrix C = cost_matrix(G, G_other);
    const double eps = opt.epsilon;
    const double log_mu = -std::log(static_cast<double>(n));
    const double log_nu = -std::log(static_cast<double>(m));

    // Scaled potentials: plan(i,j) = exp(f[i] + g[j] - C(i,j)/eps).
    std::vector<double> f(n, 0.0), g(m, 0.0);
    std::vector<double> buf(std::max(n, m));

    auto dual_objective = [&]() {
        // eps-scaled dual: sum_i mu_i*f_i + sum_j nu_j*g_j - sum_ij exp(...)
        double val = 0.0;
        for (std::size_t i = 0; i < n; ++i) val += std::exp(log_mu) * f[i];
        for (std::size_t j = 0; j < m; ++j) val += std::exp(log_nu) * g[j];
        double mass = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
                mass += std::exp(f[i] + g[j] - C(i, j) / eps);
        return val - mass;
    };

    MatchingPlan mp;
    mp.method = MatchMethod::optimal_transport;
    mp.converged = false;
    std::size_t it = 0;
    double err = std::numeric_limits<double>::infinity();
    for (; it < opt.max_iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            buf.resize(m);
            for (std::size_t j = 0; j < m; ++j) buf[j] = g[j] - C(i, j) / eps;
            f[i] = log_mu - log_sum_exp(buf);
        }
        for (std::size_t j = 0; j < m; ++j) {
            buf.resize(n);
            for (std::size_t i = 0; i < n; ++i) buf[i] = f[i] - C(i, j) / eps;
            g[j] = log_nu - log_sum_exp(buf);
        }
        if (objective_trace) objective_trace->push_back(-dual_objective());

        // After a column update the column marginals are exact; check rows.
        err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            buf.resize(m);
            for (std::size_t j = 0; j < m; ++j) buf[j] = f[i] + g[j] - C(i, j) / eps;
            err = std::max(err, std::abs(std::exp(log_sum_exp(buf)) - std::exp(log_mu)));
        }
        if (err <= opt.tol) {
            mp.converged = true;
            ++it;
            break;
        }
    }

    mp.plan = Matrix(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            mp.plan(i, j) = std::exp(f[i] + g[j] - C(i, j) / eps);
    mp.iterations = it;
    mp.marginal_error = err;
    return mp;
}

double transport_cost(const MatchingPlan& plan, const Matrix& G, const Matrix& G_other) {
    if (plan.plan.rows() != G.rows() || plan.plan.cols() != G_other.rows())
        throw Error("transport_cost: plan shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < G.rows(); ++i)
        for (std::size_t j = 0; j < G_other.rows(); ++j)
            if (plan.plan(i, j) > 0.0)
                s += plan.plan(i, j) * squared_distance(G.row(i), G_other.row(j));
    return s;
}

ReferenceSet build_reference(const MatchingPlan& plan, const Matrix& G_other) {
    const std::size_t n = plan.plan.rows(), m = plan.plan.cols();
    if (G_other.rows() != m) throw Error("build_reference: group size mismatch");
    ReferenceSet ref;
    ref.rows = Matrix(n, G_other.cols());
    ref.source_index.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        double best_p = plan.plan(i, 0);
        for (std::size_t j = 1; j < m; ++j)
            if (plan.plan(i, j) > best_p) {
                best_p = plan.plan(i, j);
                best = j;
            }
        if (best_p <= 0.0)
            throw Error("build_reference: plan row " + std::to_string(i) + " has no mass");
        ref.source_index[i] = best;
        ref.rows.set_row(i, G_other.row(best));
    }
    return ref;
}

std::vector<double> conditional_row(const MatchingPlan& plan, std::size_t i) {
    if (i >= plan.plan.rows()) throw Error("conditional_row: row out of range");
    const std::size_t m = plan.plan.cols();
    std::vector<double> p(m);
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        p[j] = plan.plan(i, j);
        s += p[j];
    }
    if (s <= 0.0)
        throw Error("conditional_row: plan row " + std::to_string(i) + " has zero mass");
    for (double& v : p) v /= s;
    return p;
}

void export_plan_csv(const MatchingPlan& plan, std::ostream& out) {
    out << "i,j,mass\n";
    char buf[32];
    for (std::size_t i = 0; i < plan.plan.rows(); ++i)
        for (std::size_t j = 0; j < plan.plan.cols(); ++j) {
            const double p = plan.plan(i, j);
            if (p <= 0.0) continue;
            snprintf(buf, sizeof buf, "%.17g", p);
            out << i << ',' << j << ',' << buf << '\n';
        }
}

}  // namespace fairshap
