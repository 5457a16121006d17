#include "fairshap/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

namespace fairshap {

void FeatureSchema::validate() const {
    if (feature_names.empty()) throw Error("schema: no features declared");
    if (feature_names.size() != feature_kinds.size())
        throw Error("schema: feature_names and feature_kinds lengths differ");
    if (label_name.empty()) throw Error("schema: label_name is empty");
    if (sensitive_name.empty()) throw Error("schema: sensitive_name is empty");
    std::set<std::string> seen;
    for (const auto& n : feature_names) {
        if (!seen.insert(n).second) throw Error("schema: duplicate feature '" + n + "'");
    }
    if (seen.count(label_name)) throw Error("schema: label '" + label_name + "' also listed as feature");
    if (seen.count(sensitive_name))
        throw Error("schema: sensitive attribute '" + sensitive_name + "' also listed as feature");
    if (sensitive_positive_values.empty())
        throw Error("schema: sensitive_positive_values is empty");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        auto b = field.find_first_not_of(" \t\r");
        auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_number(const std::string& s, std::size_t row, const std::string& col) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw Error("row " + std::to_string(row) + ": cannot parse numeric column '" + col +
                    "' from value '" + s + "'");
    return v;
}

std::string format_number(double v) {
    char buf[32];
    snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

TabularDataset load_csv(const std::string& path, const FeatureSchema& schema) {
    schema.validate();
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw Error("dataset file '" + path + "' is empty");
    const auto header = split_csv_line(line);

    std::unordered_map<std::string, std::size_t> col_of;
    for (std::size_t i = 0; i < header.size(); ++i) col_of[header[i]] = i;

    auto require = [&](const std::string& name) {
        auto it = col_of.find(name);
        if (it == col_of.end())
            throw Error("dataset file '" + path + "' is missing column '" + name + "'");
        return it->second;
    };

    std::vector<std::size_t> feat_col(schema.feature_names.size());
    for (std::size_t f = 0; f < schema.feature_names.size(); ++f)
        feat_col[f] = require(schema.feature_names[f]);
    const std::size_t label_col = require(schema.label_name);
    const std::size_t sens_col = require(schema.sensitive_name);

    TabularDataset ds;
    ds.schema = schema;

    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw Error("row " + std::to_string(row_no) + ": expected " +
                        std::to_string(header.size()) + " cells, got " +
                        std::to_string(cells.size()));

        std::vector<RawCell> row(schema.feature_names.size());
        for (std::size_t f = 0; f < schema.feature_names.size(); ++f) {
            const std::string& s = cells[feat_col[f]];
            if (schema.feature_kinds[f] == FeatureKind::numeric)
                row[f] = parse_number(s, row_no, schema.feature_names[f]);
            else
                row[f] = s;
        }
        ds.rows.push_back(std::move(row));
        ds.labels.push_back(schema.label_positive_values.count(cells[label_col]) ? 1 : 0);
        ds.sensitive.push_back(schema.sensitive_positive_values.count(cells[sens_col]) ? 1 : 0);
        ds.label_raw.push_back(cells[label_col]);
        ds.sensitive_raw.push_back(cells[sens_col]);
    }
    if (ds.rows.empty()) throw Error("dataset file '" + path + "' has no data rows");

    const bool has0 = std::count(ds.labels.begin(), ds.labels.end(), 0) > 0;
    const bool has1 = std::count(ds.labels.begin(), ds.labels.end(), 1) > 0;
    if (!has0 || !has1)
        throw Error("dataset '" + path + "': both label classes must be present");
    const bool a0 = std::count(ds.sensitive.begin(), ds.sensitive.end(), 0) > 0;
    const bool a1 = std::count(ds.sensitive.begin(), ds.sensitive.end(), 1) > 0;
    if (!a0 || !a1)
        throw Error("dataset '" + path + "': one sensitive group is empty");
    return ds;
}

void write_csv(const TabularDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write dataset file '" + path + "'");
    for (std::size_t f = 0; f < ds.schema.feature_names.size(); ++f)
        out << ds.schema.feature_names[f] << ',';
    out << ds.schema.sensitive_name << ',' << ds.schema.label_name << '\n';
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        for (std::size_t f = 0; f < ds.schema.feature_names.size(); ++f) {
            const RawCell& c = ds.rows[i][f];
            if (std::holds_alternative<double>(c))
                out << format_number(std::get<double>(c));
            else
                out << std::get<std::string>(c);
            out << ',';
        }
        const auto canon = [](int v, const std::set<std::string>& positive) -> std::string {
            if (v) return positive.empty() ? "1" : *positive.begin();
            return positive.count("0") ? "negative" : "0";
        };
        out << (i < ds.sensitive_raw.size()
                    ? ds.sensitive_raw[i]
                    : canon(ds.sensitive[i], ds.schema.sensitive_positive_values))
            << ','
            << (i < ds.label_raw.size()
                    ? ds.label_raw[i]
                    : canon(ds.labels[i], ds.schema.label_positive_values))
            << '\n';
    }
}

EncodedMatrix encode(const TabularDataset& ds, const std::vector<std::size_t>& fit_indices) {
    if (ds.n_rows() == 0) throw Error("encode: dataset is empty");
    if (fit_indices.empty()) throw Error("encode: fit index set is empty");
    for (auto i : fit_indices)
        if (i >= ds.n_rows()) throw Error("encode: fit index out of range");

    const std::size_t d = ds.n_features();
    EncodedMatrix em;
    em.blocks.resize(d);

    // First pass: derive per-feature statistics / category sets from fit rows.
    for (std::size_t f = 0; f < d; ++f) {
        RawBlock& blk = em.blocks[f];
        blk.name = ds.schema.feature_names[f];
        blk.kind = ds.schema.feature_kinds[f];
        blk.begin = em.columns.size();
        if (blk.kind == FeatureKind::numeric) {
            std::vector<double> vals;
            vals.reserve(fit_indices.size());
            for (auto i : fit_indices) vals.push_back(std::get<double>(ds.rows[i][f]));
            ColumnInfo ci;
            ci.raw_feature = f;
            ci.mean = vec_mean(vals);
            ci.sd = vec_stddev(vals, ci.mean);
            if (ci.sd < 1e-12) ci.sd = 0.0;  // constant column sentinel
            em.columns.push_back(ci);
        } else {
            std::set<std::string> cats;
            for (auto i : fit_indices) cats.insert(std::get<std::string>(ds.rows[i][f]));
            blk.categories.assign(cats.begin(), cats.end());
            for (const auto& c : blk.categories) {
                ColumnInfo ci;
                ci.raw_feature = f;
                ci.category = c;
                em.columns.push_back(ci);
            }
        }
        blk.end = em.columns.size();
    }

    // Second pass: encode every dataset row with the fit statistics.
    em.values = Matrix(ds.n_rows(), em.columns.size());
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        for (std::size_t f = 0; f < d; ++f) {
            const RawBlock& blk = em.blocks[f];
            if (blk.kind == FeatureKind::numeric) {
                const ColumnInfo& ci = em.columns[blk.begin];
                const double v = std::get<double>(ds.rows[i][f]);
                em.values(i, blk.begin) = ci.sd == 0.0 ? 0.0 : (v - ci.mean) / ci.sd;
            } else {
                const auto& cat = std::get<std::string>(ds.rows[i][f]);
                const auto it =
                    std::lower_bound(blk.categories.begin(), blk.categories.end(), cat);
                if (it != blk.categories.end() && *it == cat) {
                    const std::size_t off = static_cast<std::size_t>(it - blk.categories.begin());
                    em.values(i, blk.begin + off) = 1.0;
                } else {
                    ++em.unseen_category_count;
                }
            }
        }
    }
    return em;
}

std::vector<RawCell> EncodedMatrix::decode_row(std::size_t r) const {
    if (r >= values.rows()) throw Error("decode_row: row out of range");
    std::vector<RawCell> out(blocks.size());
    for (std::size_t f = 0; f < blocks.size(); ++f) {
        const RawBlock& blk = blocks[f];
        if (blk.kind == FeatureKind::numeric) {
            const ColumnInfo& ci = columns[blk.begin];
            out[f] = ci.sd == 0.0 ? ci.mean : values(r, blk.begin) * ci.sd + ci.mean;
        } else {
            std::size_t best = blk.begin;
            double best_v = values(r, blk.begin);
            for (std::size_t c = blk.begin + 1; c < blk.end; ++c) {
                if (values(r, c) > best_v) {
                    best_v = values(r, c);
                    best = c;
                }
            }
            out[f] = best_v > 0.0 ? columns[best].category : std::string();
        }
    }
    return out;
}

SensitiveSplit split_by_sensitive(const Matrix& X, const std::vector<int>& sensitive) {
    if (X.rows() != sensitive.size())
        throw Error("split_by_sensitive: sensitive vector length mismatch");
    SensitiveSplit sp;
    for (std::size_t i = 0; i < X.rows(); ++i)
        (sensitive[i] ? sp.index_a1 : sp.index_a0).push_back(i);
    if (sp.index_a0.empty()) throw Error("split_by_sensitive: sensitive group A=0 is empty");
    if (sp.index_a1.empty()) throw Error("split_by_sensitive: sensitive group A=1 is empty");
    sp.group_a0 = X.select_rows(sp.index_a0);
    sp.group_a1 = X.select_rows(sp.index_a1);
    return sp;
}

KFoldResult kfold_split(const TabularDataset& ds, std::size_t k, std::uint64_t seed) {
    const std::size_t n = ds.n_rows();
    if (k < 2) throw Error("kfold_split: k must be at least 2");
    if (k > n) throw Error("kfold_split: k exceeds the number of rows");

    std::map<std::pair<int, int>, std::vector<std::size_t>> joint;
    for (std::size_t i = 0; i < n; ++i)
        joint[{ds.labels[i], ds.sensitive[i]}].push_back(i);

    KFoldResult res;
    bool fallback = false;
    for (const auto& [key, idx] : joint)
        if (idx.size() < k) fallback = true;

    std::map<int, std::vector<std::size_t>> strata;
    if (fallback) {
        res.label_only_fallback = true;
        for (std::size_t i = 0; i < n; ++i) strata[ds.labels[i]].push_back(i);
    } else {
        int key = 0;
        for (auto& [jk, idx] : joint) strata[key++] = idx;
    }

    std::vector<std::vector<std::size_t>> fold_rows(k);
    std::mt19937_64 rng(seed);
    for (auto& [key, idx] : strata) {
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t p = 0; p < idx.size(); ++p) fold_rows[p % k].push_back(idx[p]);
    }
    for (auto& fr : fold_rows) std::sort(fr.begin(), fr.end());

    res.folds.resize(k);
    for (std::size_t f = 0; f < k; ++f) {
        res.folds[f].test = fold_rows[f];
        for (std::size_t g = 0; g < k; ++g)
            if (g != f)
                res.folds[f].train.insert(res.folds[f].train.end(), fold_rows[g].begin(),
                                          fold_rows[g].end());
        std::sort(res.folds[f].train.begin(), res.folds[f].train.end());
    }
    return res;
}

}  // namespace fairshap
