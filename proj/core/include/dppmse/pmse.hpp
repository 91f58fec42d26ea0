#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "dppmse/data_matrix.hpp"
#include "dppmse/models.hpp"
#include "dppmse/rng.hpp"
#include "dppmse/tree.hpp"

namespace dppmse::pmse {

/// Propensity-score mean-squared error; bounded in [0, 0.25] by construction
/// (0 = indistinguishable blocks, 0.25 = fully separable).
class PmseValue {
public:
    explicit PmseValue(double value);
    double value() const { return value_; }

private:
    double value_;
};

enum class TreeFitter { kGreedy, kExact };

/// Classifier settings for pMSE computation. Greedy fitting is the default;
/// the exhaustive fitter (exact_splits in {1,2}) is available for runs that
/// must respect the sensitivity bound exactly.
struct PmseConfig {
    cart::FitConfig fit{};
    TreeFitter fitter = TreeFitter::kGreedy;
    int exact_splits = 1;
    std::size_t exact_budget = cart::kDefaultExactBudget;
};

/// Monte-Carlo estimate of the expected pMSE for a parameter vector.
struct UtilityEstimate {
    double mean_pmse = 0.0;
    std::size_t replicate_count = 0;
    std::vector<double> per_replicate;
};

/// Stack, label, fit, predict, and average squared deviation from 0.5.
PmseValue compute_pmse(const DataMatrix &original, const DataMatrix &synthetic,
                       const PmseConfig &cfg);

/// Binds (original, config) once so repeated utility evaluations against the
/// same dataset amortize the original block's per-column presorting. Used by
/// the sampler, where thousands of evaluations share one original.
class UtilityEvaluator {
public:
    UtilityEvaluator(const DataMatrix &original, PmseConfig cfg);
    ~UtilityEvaluator();
    UtilityEvaluator(UtilityEvaluator &&) noexcept;
    UtilityEvaluator &operator=(UtilityEvaluator &&) noexcept;
    UtilityEvaluator(const UtilityEvaluator &) = delete;
    UtilityEvaluator &operator=(const UtilityEvaluator &) = delete;

    UtilityEstimate operator()(const models::ThetaVector &theta,
                               const models::GenerativeModel &model, std::size_t m,
                               RandomSource &rng) const;

    /// pMSE of one synthetic dataset against the bound original.
    double evaluate(const DataMatrix &synthetic) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// u(X, theta): draws m synthetic datasets from g(theta) (each with the same
/// row count as `original`) and averages their pMSE against `original`.
/// Replicates use independently derived seed streams, so results do not
/// depend on evaluation order.
UtilityEstimate utility(const DataMatrix &original, const models::ThetaVector &theta,
                        const models::GenerativeModel &model, std::size_t m,
                        const PmseConfig &cfg, RandomSource &rng);

/// |u(X, theta) - u(X', theta)| evaluated on a shared set of m synthetic
/// replicates (same draws for both datasets).
double sensitivity_delta(const DataMatrix &x, const DataMatrix &x_prime,
                         const models::ThetaVector &theta,
                         const models::GenerativeModel &model, std::size_t m,
                         const PmseConfig &cfg, RandomSource &rng);

/// Global sensitivity bound 1/n for pMSE with exact-optimal Gini trees.
double sensitivity_bound(std::size_t n);

}  // namespace dppmse::pmse
