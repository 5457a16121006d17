#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "fairshap/matrix.hpp"

namespace fairshap {

enum class FeatureKind { numeric, categorical };

// Declares how a CSV maps onto features, label and sensitive attribute.
// The sensitive attribute is binary: rows whose sensitive cell is in
// sensitive_positive_values get A=1, all others A=0. Same rule for the label.
struct FeatureSchema {
    std::vector<std::string> feature_names;
    std::vector<FeatureKind> feature_kinds;
    std::string label_name;
    std::set<std::string> label_positive_values{"1"};
    std::string sensitive_name;
    std::set<std::string> sensitive_positive_values{"1"};

    void validate() const;
};

// A raw cell is either a numeric value or a category string.
using RawCell = std::variant<double, std::string>;

struct TabularDataset {
    FeatureSchema schema;
    std::vector<std::vector<RawCell>> rows;  // n x n_features, schema order
    std::vector<int> labels;                 // 0/1
    std::vector<int> sensitive;              // 0/1
    // Original label/sensitive strings, kept so write_csv round-trips; when
    // empty, canonical values derived from the schema are written instead.
    std::vector<std::string> label_raw, sensitive_raw;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_features() const { return schema.feature_names.size(); }
};

TabularDataset load_csv(const std::string& path, const FeatureSchema& schema);
void write_csv(const TabularDataset& ds, const std::string& path);

// One encoded column: either a standardized numeric source column or a
// single category indicator from a one-hot block.
struct ColumnInfo {
    std::size_t raw_feature = 0;
    std::string category;  // empty for numeric columns
    double mean = 0.0;     // fit-set statistics (numeric columns only)
    double sd = 1.0;       // 0 marks a constant column (encoded as all zeros)
};

// Contiguous slice of encoded columns belonging to one raw feature.
struct RawBlock {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
    std::size_t begin = 0;  // first encoded column
    std::size_t end = 0;    // one past last
    std::vector<std::string> categories;  // fit-set categories, lexical order
};

struct EncodedMatrix {
    Matrix values;  // all dataset rows, encoded with fit-set statistics
    std::vector<ColumnInfo> columns;
    std::vector<RawBlock> blocks;  // one per raw feature, source order
    std::size_t unseen_category_count = 0;  // rows x features outside fit-set categories

    std::size_t n_raw_features() const { return blocks.size(); }
    std::vector<RawCell> decode_row(std::size_t r) const;
};

// Encodes the whole dataset using statistics and category sets derived from
// fit_indices only (a training fold). Categories absent from the fit set
// produce an all-zero block and bump unseen_category_count.
EncodedMatrix encode(const TabularDataset& ds, const std::vector<std::size_t>& fit_indices);

struct SensitiveSplit {
    Matrix group_a0, group_a1;
    std::vector<std::size_t> index_a0, index_a1;  // rows of the parent matrix
};

SensitiveSplit split_by_sensitive(const Matrix& X, const std::vector<int>& sensitive);

struct FoldSplit {
    std::vector<std::size_t> train, test;
};

struct KFoldResult {
    std::vector<FoldSplit> folds;
    bool label_only_fallback = false;  // a (label,sensitive) cell was smaller than k
};

// Stratified k-fold on the (label, sensitive) pair; falls back to label-only
// stratification when some joint cell has fewer than k rows.
KFoldResult kfold_split(const TabularDataset& ds, std::size_t k, std::uint64_t seed);

}  // namespace fairshap
