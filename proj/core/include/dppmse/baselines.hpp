#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "dppmse/data_matrix.hpp"
#include "dppmse/rng.hpp"

namespace dppmse::baselines {

/// Per-column value bounds [lower, upper), lower < upper, used by the bounded
/// baseline synthesizers for truncation and sensitivity calibration.
class Bounds {
public:
    explicit Bounds(std::vector<std::pair<double, double>> limits);

    /// [center - multiplier * sd, center + multiplier * sd] per column.
    static Bounds centered(const std::vector<double> &centers,
                           const std::vector<double> &sds, double multiplier);

    std::size_t dims() const { return limits_.size(); }
    double lower(std::size_t j) const { return limits_[j].first; }
    double upper(std::size_t j) const { return limits_[j].second; }
    double width(std::size_t j) const { return limits_[j].second - limits_[j].first; }

    DataMatrix clamp(const DataMatrix &x) const;
    bool contains(const DataMatrix &x) const;

private:
    std::vector<std::pair<double, double>> limits_;
};

/// Zero-centered Laplace draw; scale must be > 0.
double laplace_noise(double scale, RandomSource &rng);

/// Noise calibration for one private parameter draw of the noisy-BPPD
/// synthesizer: the five sufficient sums (Sx, Sx2, Sy, Sxy, Sy2) of the
/// sequential Gaussian model, their sensitivities under the bounds, and the
/// Laplace scales at an even epsilon split.
struct NoisyBppdPlan {
    std::array<double, 5> sensitivity;
    std::array<double, 5> scale;
    double eps_per_stat;
};
NoisyBppdPlan noisy_bppd_plan(const Bounds &bounds, double eps_draw);

/// Noisy Bayesian posterior-predictive synthesis: clamp to bounds, perturb the
/// sufficient statistics with Laplace noise at budget epsilon_total / l per
/// draw (split evenly across statistics), draw model parameters from the
/// noisy-statistic posterior, generate, clamp the output. Returns l datasets.
std::vector<DataMatrix> noisy_bppd_synthesize(const DataMatrix &x, const Bounds &bounds,
                                              double epsilon_total, std::size_t l,
                                              RandomSource &rng);

/// How the histogram smoothing level is calibrated. kPerSample applies the
/// e^(eps/n) bound (n sampled rows compose to eps); kPerRelease applies e^eps
/// to a single release, which is how the comparison experiments run it.
enum class HistogramPrivacyUnit { kPerSample, kPerRelease };

/// Equal-width histogram over the bounded box, mixed with the uniform density:
/// f* = (1 - lambda) f_hat + lambda * Omega, lambda at its lower bound.
class SmoothHistogram {
public:
    SmoothHistogram(Bounds bounds, std::vector<std::size_t> bins_per_dim,
                    double lambda, std::vector<double> cell_probabilities);

    const Bounds &bounds() const { return bounds_; }
    const std::vector<std::size_t> &bins_per_dim() const { return bins_; }
    double lambda() const { return lambda_; }
    std::size_t total_cells() const { return probs_.size(); }
    const std::vector<double> &cell_probabilities() const { return probs_; }

private:
    Bounds bounds_;
    std::vector<std::size_t> bins_;
    double lambda_;
    std::vector<double> probs_;
};

SmoothHistogram smooth_histogram_fit(const DataMatrix &x, const Bounds &bounds,
                                     const std::vector<std::size_t> &bins_per_dim,
                                     double epsilon,
                                     HistogramPrivacyUnit unit =
                                         HistogramPrivacyUnit::kPerSample);

/// Samples cells by probability, then uniformly within each cell.
DataMatrix smooth_histogram_sample(const SmoothHistogram &hist, std::size_t n_out,
                                   RandomSource &rng,
                                   std::vector<std::string> column_names = {});

/// Non-private posterior-predictive synthesis of the sequential Gaussian model
/// under diffuse conjugate priors; l independent parameter draws and datasets.
std::vector<DataMatrix> nondp_bppd_synthesize(const DataMatrix &x, std::size_t l,
                                              RandomSource &rng);

}  // namespace dppmse::baselines
