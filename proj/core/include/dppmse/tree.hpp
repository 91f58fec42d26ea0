#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "dppmse/data_matrix.hpp"

namespace dppmse::cart {

/// Axis-aligned split: rows with value <= threshold go left, > threshold right.
struct SplitRule {
    std::size_t feature = 0;
    double threshold = 0.0;
};

/// Binary classification tree node. Leaves hold (count_ones, count_total);
/// the leaf's predicted probability of class 1 is count_ones / count_total.
class TreeNode {
public:
    static TreeNode leaf(std::size_t count_ones, std::size_t count_total);
    static TreeNode split(SplitRule rule, TreeNode left, TreeNode right);

    TreeNode(TreeNode &&) = default;
    TreeNode &operator=(TreeNode &&) = default;
    TreeNode(const TreeNode &) = delete;
    TreeNode &operator=(const TreeNode &) = delete;

    bool is_leaf() const { return !left_; }
    const SplitRule &rule() const { return rule_; }
    const TreeNode &left() const { return *left_; }
    const TreeNode &right() const { return *right_; }

    std::size_t count_ones() const { return count_ones_; }
    std::size_t count_total() const { return count_total_; }
    double leaf_probability() const {
        return static_cast<double>(count_ones_) / static_cast<double>(count_total_);
    }

    std::size_t leaf_count() const;
    std::size_t internal_count() const;

private:
    TreeNode() = default;
    SplitRule rule_{};
    std::unique_ptr<TreeNode> left_;
    std::unique_ptr<TreeNode> right_;
    std::size_t count_ones_ = 0;   // a_i, leaves only
    std::size_t count_total_ = 0;  // m_i, leaves only
};

/// Stopping rules for the greedy fitter.
struct FitConfig {
    static constexpr int kUnlimitedDepth = std::numeric_limits<int>::max();

    int max_depth = kUnlimitedDepth;
    /// Relative improvement rule: a split is accepted only if it reduces total
    /// impurity by at least cp * (root impurity of the whole tree). cp == 0
    /// accepts any available split (saturation limited by min_leaf/depth).
    double cp = 0.01;
    std::size_t min_leaf = 1;
};

inline constexpr std::size_t kDefaultExactBudget = 500'000'000;

/// Total Gini impurity over leaves: sum of a_i * (1 - a_i / m_i).
double gini_index(const TreeNode &tree);

/// Recursive best-first splitting on (feature, threshold) candidates taken at
/// midpoints of consecutive distinct sorted values. Ties in impurity resolve
/// to the lowest feature index, then the lowest threshold.
TreeNode fit_greedy(const LabeledPool &pool, const FitConfig &cfg);

/// Exhaustive search over all axis-aligned trees with at most `num_splits`
/// splits (1 or 2); returns the global impurity minimizer. The work guard
/// N * candidates^D must not exceed `work_budget`.
TreeNode fit_exact(const LabeledPool &pool, int num_splits,
                   std::size_t work_budget = kDefaultExactBudget);

/// Routes every pool row to its leaf and returns the leaf probabilities.
std::vector<double> predict_proba(const TreeNode &tree, const LabeledPool &pool);

/// Indented text rendering of split rules and leaf counts (debugging aid,
/// not a stable format).
std::string dump(const TreeNode &tree);

}  // namespace dppmse::cart
