#pragma once

#include <cstdint>

#include "fairshap/dataset.hpp"

namespace fairshap {

// Synthetic credit-scoring dataset for tests and demos: 14 features (9
// numeric, 5 categorical), binary sex attribute, binary risk label. One
// group is issued systematically longer durations while a direct effect in
// the historical outcomes keeps the group approval rates level, so models
// that shortcut through the sensitive input can be detected and repaired by
// editing the mediating feature toward matched cross-group references.
TabularDataset make_credit_dataset(std::size_t n_rows, std::uint64_t seed);

// Small fully-categorical dataset for distribution-distance tests.
TabularDataset make_discrete_dataset(std::size_t n_rows, std::uint64_t seed);

}  // namespace fairshap
