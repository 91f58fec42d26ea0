#include "dppmse/pmse.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "dppmse/errors.hpp"
#include "tree_internal.hpp"

namespace dppmse::pmse {

PmseValue::PmseValue(double value) : value_(value) {
    if (!(value >= -1e-9 && value <= 0.25 + 1e-9)) {
        throw DomainError("pMSE value " + std::to_string(value) +
                          " outside [0, 0.25]");
    }
}

namespace {

double mean_squared_deviation(const std::vector<double> &probs) {
    double total = 0.0;
    for (double p : probs) {
        const double d = p - 0.5;
        total += d * d;
    }
    return total / static_cast<double>(probs.size());
}

}  // namespace

// Holds a copy of the original block with presorted columns; each evaluation
// sorts only the synthetic block and merges.
struct UtilityEvaluator::Impl {
    Impl(const DataMatrix &original, PmseConfig config)
        : x(original), cfg(std::move(config)), n(original.rows()),
          q(original.cols()) {
        original_sorted.resize(q);
        for (std::size_t f = 0; f < q; ++f) {
            auto &col = original_sorted[f];
            col.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                col[i] = {x(i, f), static_cast<std::int32_t>(i)};
            }
            std::sort(col.begin(), col.end());
        }
    }

    double evaluate(const DataMatrix &synthetic) const {
        if (synthetic.rows() != n || synthetic.cols() != q) {
            throw ShapeError("pMSE: original is " + std::to_string(n) + "x" +
                             std::to_string(q) + " but synthetic is " +
                             std::to_string(synthetic.rows()) + "x" +
                             std::to_string(synthetic.cols()));
        }
        if (cfg.fitter == TreeFitter::kExact) {
            return compute_pmse(x, synthetic, cfg).value();
        }
        auto prepared = build_pool(synthetic);
        const auto tree = cart::detail::fit_greedy_prepared(prepared, cfg.fit);
        return mean_squared_deviation(
            cart::detail::predict_proba_prepared(tree, prepared));
    }

    cart::detail::PreparedPool build_pool(const DataMatrix &synthetic) const {
        cart::detail::PreparedPool p;
        const std::size_t big_n = 2 * n;
        p.n_rows = big_n;
        p.n_ones = n;
        p.labels.assign(big_n, 0);
        std::fill(p.labels.begin() + n, p.labels.end(), 1);
        p.cols.resize(q);
        p.orders.resize(q);
        std::vector<std::pair<double, std::int32_t>> syn_sorted(n);
        std::vector<std::pair<double, std::int32_t>> merged(big_n);
        for (std::size_t f = 0; f < q; ++f) {
            auto &col = p.cols[f];
            col.resize(big_n);
            for (std::size_t i = 0; i < n; ++i) {
                col[i] = x(i, f);
            }
            for (std::size_t i = 0; i < n; ++i) {
                const double v = synthetic(i, f);
                col[n + i] = v;
                syn_sorted[i] = {v, static_cast<std::int32_t>(n + i)};
            }
            std::sort(syn_sorted.begin(), syn_sorted.end());
            std::merge(original_sorted[f].begin(), original_sorted[f].end(),
                       syn_sorted.begin(), syn_sorted.end(), merged.begin());
            auto &ord = p.orders[f];
            ord.resize(big_n);
            for (std::size_t i = 0; i < big_n; ++i) {
                ord[i] = merged[i].second;
            }
        }
        return p;
    }

    UtilityEstimate run(const models::ThetaVector &theta,
                        const models::GenerativeModel &model, std::size_t m,
                        RandomSource &rng) const {
        if (m < 1) {
            throw DomainError("utility: replicate count m must be >= 1");
        }
        model.check_domain(theta);
        const std::uint64_t base = rng.next_raw();
        UtilityEstimate estimate;
        estimate.replicate_count = m;
        estimate.per_replicate.reserve(m);
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            RandomSource replicate_rng(mix_seed(base, j));
            const auto synthetic = model.sample(theta, n, replicate_rng);
            const double value = evaluate(synthetic);
            estimate.per_replicate.push_back(value);
            total += value;
        }
        estimate.mean_pmse = total / static_cast<double>(m);
        return estimate;
    }

    DataMatrix x;
    PmseConfig cfg;
    std::size_t n;
    std::size_t q;
    std::vector<std::vector<std::pair<double, std::int32_t>>> original_sorted;
};

UtilityEvaluator::UtilityEvaluator(const DataMatrix &original, PmseConfig cfg)
    : impl_(std::make_unique<Impl>(original, std::move(cfg))) {}
UtilityEvaluator::~UtilityEvaluator() = default;
UtilityEvaluator::UtilityEvaluator(UtilityEvaluator &&) noexcept = default;
UtilityEvaluator &UtilityEvaluator::operator=(UtilityEvaluator &&) noexcept = default;

UtilityEstimate UtilityEvaluator::operator()(const models::ThetaVector &theta,
                                             const models::GenerativeModel &model,
                                             std::size_t m, RandomSource &rng) const {
    return impl_->run(theta, model, m, rng);
}

double UtilityEvaluator::evaluate(const DataMatrix &synthetic) const {
    return impl_->evaluate(synthetic);
}

PmseValue compute_pmse(const DataMatrix &original, const DataMatrix &synthetic,
                       const PmseConfig &cfg) {
    const auto pool = stack_and_label(original, synthetic);
    cart::TreeNode tree = cfg.fitter == TreeFitter::kGreedy
                              ? cart::fit_greedy(pool, cfg.fit)
                              : cart::fit_exact(pool, cfg.exact_splits,
                                                cfg.exact_budget);
    return PmseValue(mean_squared_deviation(cart::predict_proba(tree, pool)));
}

UtilityEstimate utility(const DataMatrix &original, const models::ThetaVector &theta,
                        const models::GenerativeModel &model, std::size_t m,
                        const PmseConfig &cfg, RandomSource &rng) {
    UtilityEvaluator evaluator(original, cfg);
    return evaluator(theta, model, m, rng);
}

double sensitivity_delta(const DataMatrix &x, const DataMatrix &x_prime,
                         const models::ThetaVector &theta,
                         const models::GenerativeModel &model, std::size_t m,
                         const PmseConfig &cfg, RandomSource &rng) {
    if (m < 1) {
        throw DomainError("sensitivity_delta: replicate count m must be >= 1");
    }
    if (x.rows() != x_prime.rows() || x.cols() != x_prime.cols()) {
        throw ShapeError("sensitivity_delta: x is " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + " but x_prime is " +
                         std::to_string(x_prime.rows()) + "x" +
                         std::to_string(x_prime.cols()));
    }
    model.check_domain(theta);
    const std::uint64_t base = rng.next_raw();
    const UtilityEvaluator eval_x(x, cfg);
    const UtilityEvaluator eval_xp(x_prime, cfg);
    double u_x = 0.0;
    double u_xp = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        // Shared replicates: the same synthetic draw scores both datasets.
        RandomSource replicate_rng(mix_seed(base, j));
        const auto synthetic = model.sample(theta, x.rows(), replicate_rng);
        u_x += eval_x.evaluate(synthetic);
        u_xp += eval_xp.evaluate(synthetic);
    }
    return std::abs(u_x - u_xp) / static_cast<double>(m);
}

double sensitivity_bound(std::size_t n) {
    if (n < 1) {
        throw DomainError("sensitivity_bound requires n >= 1");
    }
    return 1.0 / static_cast<double>(n);
}

}  // namespace dppmse::pmse
