#pragma once

// Shared between tree.cpp and pmse.cpp: a column-major pool representation
// with presorted per-feature row orders, so pMSE evaluation can reuse the
// original block's sort across many synthetic replicates.

#include <cstdint>
#include <vector>

#include "dppmse/tree.hpp"

namespace dppmse::cart::detail {

struct PreparedPool {
    std::size_t n_rows = 0;
    std::size_t n_ones = 0;
    std::vector<std::vector<double>> cols;        // [feature][row]
    std::vector<std::vector<std::int32_t>> orders;  // row ids sorted by value
    std::vector<std::uint8_t> labels;
};

PreparedPool prepare_pool(const LabeledPool &pool);

/// Greedy fit on a prepared pool; `orders` is used as mutable workspace.
TreeNode fit_greedy_prepared(PreparedPool &prepared, const FitConfig &cfg);

/// Leaf probability per row, routed through the prepared columns.
std::vector<double> predict_proba_prepared(const TreeNode &tree,
                                           const PreparedPool &prepared);

}  // namespace dppmse::cart::detail
