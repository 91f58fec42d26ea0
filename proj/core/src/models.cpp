#include "dppmse/models.hpp"

#include <cmath>
#include <numbers>

#include "dppmse/errors.hpp"

namespace dppmse::models {

ThetaVector::ThetaVector(std::vector<double> p) : params(std::move(p)) {
    for (double v : params) {
        if (!std::isfinite(v)) {
            throw DomainError("ThetaVector entries must be finite");
        }
    }
}

void GenerativeModel::check_domain(const ThetaVector &theta) const {
    if (theta.size() != arity()) {
        throw ModelDomainError("theta has " + std::to_string(theta.size()) +
                               " entries; model expects " + std::to_string(arity()));
    }
    if (!in_domain(theta)) {
        throw ModelDomainError("theta outside model domain (scale entries must be > 0)");
    }
}

SequentialGaussianModel::SequentialGaussianModel(std::size_t n_out) : n_out_(n_out) {
    if (n_out_ < 1) {
        throw DomainError("SequentialGaussianModel requires n_out >= 1");
    }
}

bool SequentialGaussianModel::in_domain(const ThetaVector &theta) const {
    return theta.size() == 5 && theta[1] > 0.0 && theta[4] > 0.0;
}

DataMatrix SequentialGaussianModel::sample(const ThetaVector &theta,
                                           std::size_t n_rows,
                                           RandomSource &rng) const {
    check_domain(theta);
    std::vector<double> values(n_rows * 2);
    for (std::size_t i = 0; i < n_rows; ++i) {
        const double x1 = rng.normal(theta[0], theta[1]);
        const double x2 = rng.normal(theta[2] + theta[3] * x1, theta[4]);
        values[2 * i] = x1;
        values[2 * i + 1] = x2;
    }
    return DataMatrix(std::move(values), n_rows, {"x1", "x2"});
}

double log_prior(const FlatPrior &prior, const ThetaVector &theta) {
    if (!(prior.sd > 0.0)) {
        throw DomainError("FlatPrior.sd must be > 0");
    }
    const double log_norm =
        -0.5 * std::log(2.0 * std::numbers::pi * prior.sd * prior.sd);
    double total = 0.0;
    for (double v : theta.params) {
        total += log_norm - v * v / (2.0 * prior.sd * prior.sd);
    }
    return total;
}

DataMatrix sample_synthetic(const GenerativeModel &model, const ThetaVector &theta,
                            RandomSource &rng) {
    return model.sample(theta, model.default_rows(), rng);
}

DataMatrix generate_from_theta(const GenerativeModel &model, const ThetaVector &theta,
                               std::size_t n_rows, std::uint64_t seed) {
    RandomSource rng(seed);
    return model.sample(theta, n_rows, rng);
}

}  // namespace dppmse::models
