#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dppmse/data_matrix.hpp"
#include "dppmse/rng.hpp"

namespace dppmse::models {

/// Parameter vector theta of a generative model. Entries must be finite.
struct ThetaVector {
    std::vector<double> params;

    ThetaVector() = default;
    explicit ThetaVector(std::vector<double> p);

    std::size_t size() const { return params.size(); }
    double operator[](std::size_t i) const { return params[i]; }
};

/// Pluggable synthesis model g(theta): arity, domain check, and a sampler.
class GenerativeModel {
public:
    virtual ~GenerativeModel() = default;

    virtual std::size_t arity() const = 0;
    virtual std::size_t columns() const = 0;
    virtual std::size_t default_rows() const = 0;
    virtual bool in_domain(const ThetaVector &theta) const = 0;

    /// Throws ModelDomainError with a reason when theta is outside the domain.
    void check_domain(const ThetaVector &theta) const;

    virtual DataMatrix sample(const ThetaVector &theta, std::size_t n_rows,
                              RandomSource &rng) const = 0;
};

/// Two-column sequential Gaussian model:
///   col1 ~ Normal(theta[0], theta[1])
///   col2 ~ Normal(theta[2] + theta[3] * col1, theta[4])
/// The scale entries theta[1], theta[4] are standard deviations and must be
/// strictly positive. (Where the source distributions are written N(a, b),
/// this library reads b as a standard deviation throughout; see README.)
class SequentialGaussianModel final : public GenerativeModel {
public:
    explicit SequentialGaussianModel(std::size_t n_out);

    std::size_t arity() const override { return 5; }
    std::size_t columns() const override { return 2; }
    std::size_t default_rows() const override { return n_out_; }
    bool in_domain(const ThetaVector &theta) const override;
    DataMatrix sample(const ThetaVector &theta, std::size_t n_rows,
                      RandomSource &rng) const override;

private:
    std::size_t n_out_;
};

/// Independent zero-mean Gaussian prior on every theta component. Wide enough
/// to leave utility comparisons untouched while making the sampling density
/// proper in the tails.
struct FlatPrior {
    double sd = 100000.0;
};

/// Sum over components of the Normal(0, prior.sd) log-density.
double log_prior(const FlatPrior &prior, const ThetaVector &theta);

/// Draws one synthetic dataset of the model's default size.
DataMatrix sample_synthetic(const GenerativeModel &model, const ThetaVector &theta,
                            RandomSource &rng);

/// Post-processing entry point: synthesis from (theta, n_rows, seed) alone.
/// Deliberately takes no data argument, so released datasets are a function
/// of the private parameter draw only.
DataMatrix generate_from_theta(const GenerativeModel &model, const ThetaVector &theta,
                               std::size_t n_rows, std::uint64_t seed);

}  // namespace dppmse::models
