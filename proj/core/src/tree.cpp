#include "dppmse/tree.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "dppmse/errors.hpp"
#include "tree_internal.hpp"

namespace dppmse::cart {

TreeNode TreeNode::leaf(std::size_t count_ones, std::size_t count_total) {
    if (count_total == 0 || count_ones > count_total) {
        throw DomainError("TreeNode leaf requires 0 <= a <= m and m >= 1");
    }
    TreeNode node;
    node.count_ones_ = count_ones;
    node.count_total_ = count_total;
    return node;
}

TreeNode TreeNode::split(SplitRule rule, TreeNode left, TreeNode right) {
    TreeNode node;
    node.rule_ = rule;
    node.left_ = std::make_unique<TreeNode>(std::move(left));
    node.right_ = std::make_unique<TreeNode>(std::move(right));
    return node;
}

std::size_t TreeNode::leaf_count() const {
    return is_leaf() ? 1 : left().leaf_count() + right().leaf_count();
}

std::size_t TreeNode::internal_count() const {
    return is_leaf() ? 0 : 1 + left().internal_count() + right().internal_count();
}

namespace {

// Leaf impurity a * (1 - a/m), computed as a*(m-a)/m.
inline double leaf_gini(std::size_t a, std::size_t m) {
    return static_cast<double>(a) * static_cast<double>(m - a) / static_cast<double>(m);
}

// Midpoint threshold between two consecutive distinct values, nudged so the
// <=-rule keeps the boundary between them even when they are adjacent doubles.
inline double boundary_threshold(double lo, double hi) {
    double thr = lo + 0.5 * (hi - lo);
    if (!(thr < hi)) {
        thr = lo;
    }
    return thr;
}

struct BestSplit {
    bool found = false;
    double child_sum = 0.0;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left_rows = 0;
    std::size_t left_ones = 0;
};

}  // namespace

namespace detail {

PreparedPool prepare_pool(const LabeledPool &pool) {
    PreparedPool p;
    p.n_rows = pool.size();
    p.n_ones = pool.ones();
    p.labels = pool.labels();
    p.cols = pool.predictors().columns();
    const std::size_t q = p.cols.size();
    p.orders.resize(q);
    for (std::size_t f = 0; f < q; ++f) {
        auto &ord = p.orders[f];
        ord.resize(p.n_rows);
        for (std::size_t i = 0; i < p.n_rows; ++i) {
            ord[i] = static_cast<std::int32_t>(i);
        }
        const double *vals = p.cols[f].data();
        std::sort(ord.begin(), ord.end(), [vals](std::int32_t a, std::int32_t b) {
            return vals[a] != vals[b] ? vals[a] < vals[b] : a < b;
        });
    }
    return p;
}

namespace {

struct GreedyContext {
    PreparedPool &pool;
    const FitConfig &cfg;
    double root_gini;
    std::vector<std::uint8_t> mask;        // split membership, indexed by row
    std::vector<std::int32_t> scratch;     // stable-partition buffer
};

BestSplit best_split_in_range(const GreedyContext &ctx, std::size_t lo, std::size_t hi,
                              std::size_t node_ones) {
    BestSplit best;
    const std::size_t m = hi - lo;
    const std::size_t min_leaf = ctx.cfg.min_leaf;
    for (std::size_t f = 0; f < ctx.pool.cols.size(); ++f) {
        const double *vals = ctx.pool.cols[f].data();
        const auto &ord = ctx.pool.orders[f];
        std::size_t left_ones = 0;
        for (std::size_t i = lo; i + 1 < hi; ++i) {
            left_ones += ctx.pool.labels[ord[i]];
            const double v = vals[ord[i]];
            const double v_next = vals[ord[i + 1]];
            if (v == v_next) {
                continue;
            }
            const std::size_t left_rows = i - lo + 1;
            if (left_rows < min_leaf || m - left_rows < min_leaf) {
                continue;
            }
            const double child_sum = leaf_gini(left_ones, left_rows) +
                                     leaf_gini(node_ones - left_ones, m - left_rows);
            if (!best.found || child_sum < best.child_sum) {
                best.found = true;
                best.child_sum = child_sum;
                best.feature = f;
                best.threshold = boundary_threshold(v, v_next);
                best.left_rows = left_rows;
                best.left_ones = left_ones;
            }
        }
    }
    return best;
}

// Stable-partitions every feature's order slice so rows routed left come
// first; relative order within each side is preserved.
void partition_orders(GreedyContext &ctx, std::size_t lo, std::size_t hi,
                      const BestSplit &split) {
    const double *split_vals = ctx.pool.cols[split.feature].data();
    const auto &split_ord = ctx.pool.orders[split.feature];
    for (std::size_t i = lo; i < hi; ++i) {
        ctx.mask[split_ord[i]] =
            split_vals[split_ord[i]] <= split.threshold ? 1 : 0;
    }
    for (auto &ord : ctx.pool.orders) {
        std::size_t out = 0;
        std::size_t spill = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            const std::int32_t row = ord[i];
            if (ctx.mask[row]) {
                ord[lo + out++] = row;
            } else {
                ctx.scratch[spill++] = row;
            }
        }
        std::copy(ctx.scratch.begin(), ctx.scratch.begin() + spill,
                  ord.begin() + lo + out);
    }
}

TreeNode grow(GreedyContext &ctx, std::size_t lo, std::size_t hi,
              std::size_t node_ones, int depth) {
    const std::size_t m = hi - lo;
    const bool pure = node_ones == 0 || node_ones == m;
    if (depth >= ctx.cfg.max_depth || pure || m < 2 * ctx.cfg.min_leaf) {
        return TreeNode::leaf(node_ones, m);
    }
    const BestSplit best = best_split_in_range(ctx, lo, hi, node_ones);
    if (!best.found) {
        return TreeNode::leaf(node_ones, m);
    }
    if (ctx.cfg.cp > 0.0) {
        const double improvement = leaf_gini(node_ones, m) - best.child_sum;
        if (improvement < ctx.cfg.cp * ctx.root_gini) {
            return TreeNode::leaf(node_ones, m);
        }
    }
    partition_orders(ctx, lo, hi, best);
    TreeNode left = grow(ctx, lo, lo + best.left_rows, best.left_ones, depth + 1);
    TreeNode right = grow(ctx, lo + best.left_rows, hi, node_ones - best.left_ones,
                          depth + 1);
    return TreeNode::split(SplitRule{best.feature, best.threshold}, std::move(left),
                           std::move(right));
}

}  // namespace

TreeNode fit_greedy_prepared(PreparedPool &prepared, const FitConfig &cfg) {
    if (cfg.cp < 0.0) {
        throw DomainError("FitConfig.cp must be >= 0");
    }
    if (cfg.min_leaf < 1) {
        throw DomainError("FitConfig.min_leaf must be >= 1");
    }
    if (cfg.max_depth < 0) {
        throw DomainError("FitConfig.max_depth must be >= 0");
    }
    GreedyContext ctx{prepared, cfg, leaf_gini(prepared.n_ones, prepared.n_rows),
                      std::vector<std::uint8_t>(prepared.n_rows),
                      std::vector<std::int32_t>(prepared.n_rows)};
    return grow(ctx, 0, prepared.n_rows, prepared.n_ones, 0);
}

std::vector<double> predict_proba_prepared(const TreeNode &tree,
                                           const PreparedPool &prepared) {
    std::vector<double> out(prepared.n_rows);
    for (std::size_t i = 0; i < prepared.n_rows; ++i) {
        const TreeNode *node = &tree;
        while (!node->is_leaf()) {
            const auto &r = node->rule();
            node = prepared.cols[r.feature][i] <= r.threshold ? &node->left()
                                                              : &node->right();
        }
        out[i] = node->leaf_probability();
    }
    return out;
}

}  // namespace detail

double gini_index(const TreeNode &tree) {
    if (tree.is_leaf()) {
        return leaf_gini(tree.count_ones(), tree.count_total());
    }
    return gini_index(tree.left()) + gini_index(tree.right());
}

TreeNode fit_greedy(const LabeledPool &pool, const FitConfig &cfg) {
    auto prepared = detail::prepare_pool(pool);
    return detail::fit_greedy_prepared(prepared, cfg);
}

std::vector<double> predict_proba(const TreeNode &tree, const LabeledPool &pool) {
    const auto prepared_cols = pool.predictors().columns();
    std::vector<double> out(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const TreeNode *node = &tree;
        while (!node->is_leaf()) {
            const auto &r = node->rule();
            node = prepared_cols[r.feature][i] <= r.threshold ? &node->left()
                                                              : &node->right();
        }
        out[i] = node->leaf_probability();
    }
    return out;
}

namespace {

struct SubSplit {
    double impurity = 0.0;  // total over the two leaves
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left_rows = 0;
    std::size_t left_ones = 0;
};

// Globally best single split of an arbitrary row subset; first-found wins ties
// (features ascending, thresholds ascending).
std::optional<SubSplit> best_split_of_subset(const detail::PreparedPool &pool,
                                             const std::vector<std::int32_t> &rows,
                                             std::size_t ones) {
    std::optional<SubSplit> best;
    const std::size_t m = rows.size();
    std::vector<std::pair<double, std::int32_t>> sorted(m);
    for (std::size_t f = 0; f < pool.cols.size(); ++f) {
        const double *vals = pool.cols[f].data();
        for (std::size_t i = 0; i < m; ++i) {
            sorted[i] = {vals[rows[i]], rows[i]};
        }
        std::sort(sorted.begin(), sorted.end());
        std::size_t left_ones = 0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            left_ones += pool.labels[sorted[i].second];
            if (sorted[i].first == sorted[i + 1].first) {
                continue;
            }
            const double imp = leaf_gini(left_ones, i + 1) +
                               leaf_gini(ones - left_ones, m - i - 1);
            if (!best || imp < best->impurity) {
                best = SubSplit{imp, f,
                                boundary_threshold(sorted[i].first, sorted[i + 1].first),
                                i + 1, left_ones};
            }
        }
    }
    return best;
}

TreeNode two_leaf_tree(const SubSplit &s, std::size_t ones, std::size_t total) {
    return TreeNode::split(SplitRule{s.feature, s.threshold},
                           TreeNode::leaf(s.left_ones, s.left_rows),
                           TreeNode::leaf(ones - s.left_ones, total - s.left_rows));
}

}  // namespace

TreeNode fit_exact(const LabeledPool &pool, int num_splits, std::size_t work_budget) {
    if (num_splits < 1 || num_splits > 2) {
        throw DomainError("fit_exact supports num_splits in {1, 2}");
    }
    const auto prepared = detail::prepare_pool(pool);
    const std::size_t n_rows = prepared.n_rows;
    const std::size_t q = prepared.cols.size();

    // Root-level candidate count drives the work guard N * C^D.
    std::size_t candidates = 0;
    for (std::size_t f = 0; f < q; ++f) {
        const auto &ord = prepared.orders[f];
        const double *vals = prepared.cols[f].data();
        for (std::size_t i = 0; i + 1 < n_rows; ++i) {
            if (vals[ord[i]] != vals[ord[i + 1]]) {
                ++candidates;
            }
        }
    }
    double work = static_cast<double>(n_rows);
    for (int d = 0; d < num_splits; ++d) {
        work *= static_cast<double>(candidates);
    }
    if (work > static_cast<double>(work_budget)) {
        throw ResourceError(
            "fit_exact: work estimate " + std::to_string(work) + " exceeds budget " +
            std::to_string(work_budget) + "; reduce the pool size or num_splits");
    }

    const std::size_t n_ones = prepared.n_ones;

    // Enumeration order fixes tie-breaking: the no-split tree, then all
    // single splits, then all two-split trees; strictly better impurity wins.
    double best_impurity = leaf_gini(n_ones, n_rows);
    enum class Kind { kLeaf, kOneSplit, kTwoSplit };
    Kind best_kind = Kind::kLeaf;
    SubSplit best_root{};
    bool best_second_on_left = false;
    SubSplit best_second{};

    std::vector<std::int32_t> left_rows_buf;
    std::vector<std::int32_t> right_rows_buf;

    for (std::size_t f = 0; f < q; ++f) {
        const auto &ord = prepared.orders[f];
        const double *vals = prepared.cols[f].data();
        std::size_t left_ones = 0;
        for (std::size_t i = 0; i + 1 < n_rows; ++i) {
            left_ones += prepared.labels[ord[i]];
            if (vals[ord[i]] == vals[ord[i + 1]]) {
                continue;
            }
            const std::size_t left_count = i + 1;
            const SubSplit root{leaf_gini(left_ones, left_count) +
                                    leaf_gini(n_ones - left_ones, n_rows - left_count),
                                f, boundary_threshold(vals[ord[i]], vals[ord[i + 1]]),
                                left_count, left_ones};
            if (root.impurity < best_impurity) {
                best_impurity = root.impurity;
                best_kind = Kind::kOneSplit;
                best_root = root;
            }
            if (num_splits < 2) {
                continue;
            }
            left_rows_buf.assign(ord.begin(), ord.begin() + left_count);
            right_rows_buf.assign(ord.begin() + left_count, ord.end());
            const double left_leaf = leaf_gini(left_ones, left_count);
            const double right_leaf =
                leaf_gini(n_ones - left_ones, n_rows - left_count);
            if (auto sub = best_split_of_subset(prepared, left_rows_buf, left_ones)) {
                const double total = sub->impurity + right_leaf;
                if (total < best_impurity) {
                    best_impurity = total;
                    best_kind = Kind::kTwoSplit;
                    best_root = root;
                    best_second_on_left = true;
                    best_second = *sub;
                }
            }
            if (auto sub = best_split_of_subset(prepared, right_rows_buf,
                                                n_ones - left_ones)) {
                const double total = left_leaf + sub->impurity;
                if (total < best_impurity) {
                    best_impurity = total;
                    best_kind = Kind::kTwoSplit;
                    best_root = root;
                    best_second_on_left = false;
                    best_second = *sub;
                }
            }
        }
    }

    switch (best_kind) {
    case Kind::kLeaf:
        return TreeNode::leaf(n_ones, n_rows);
    case Kind::kOneSplit:
        return two_leaf_tree(best_root, n_ones, n_rows);
    case Kind::kTwoSplit: {
        const std::size_t side_ones =
            best_second_on_left ? best_root.left_ones : n_ones - best_root.left_ones;
        const std::size_t side_total =
            best_second_on_left ? best_root.left_rows : n_rows - best_root.left_rows;
        TreeNode inner = two_leaf_tree(best_second, side_ones, side_total);
        if (best_second_on_left) {
            return TreeNode::split(
                SplitRule{best_root.feature, best_root.threshold}, std::move(inner),
                TreeNode::leaf(n_ones - best_root.left_ones,
                               n_rows - best_root.left_rows));
        }
        return TreeNode::split(SplitRule{best_root.feature, best_root.threshold},
                               TreeNode::leaf(best_root.left_ones, best_root.left_rows),
                               std::move(inner));
    }
    }
    throw std::logic_error("fit_exact: unreachable");
}

namespace {

void dump_node(const TreeNode &node, int indent, std::ostringstream &out) {
    for (int i = 0; i < indent; ++i) {
        out << "  ";
    }
    if (node.is_leaf()) {
        out << "leaf a=" << node.count_ones() << " m=" << node.count_total()
            << " p=" << node.leaf_probability() << "\n";
        return;
    }
    out << "split feature=" << node.rule().feature
        << " threshold=" << node.rule().threshold << "\n";
    dump_node(node.left(), indent + 1, out);
    dump_node(node.right(), indent + 1, out);
}

}  // namespace

std::string dump(const TreeNode &tree) {
    std::ostringstream out;
    dump_node(tree, 0, out);
    return out.str();
}

}  // namespace dppmse::cart
