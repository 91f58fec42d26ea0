#include "dppmse/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dppmse/errors.hpp"
#include "dppmse/models.hpp"

namespace dppmse::baselines {

Bounds::Bounds(std::vector<std::pair<double, double>> limits)
    : limits_(std::move(limits)) {
    if (limits_.empty()) {
        throw DomainError("Bounds requires at least one column");
    }
    for (std::size_t j = 0; j < limits_.size(); ++j) {
        if (!(limits_[j].first < limits_[j].second)) {
            throw DomainError("Bounds column " + std::to_string(j) +
                              ": lower must be < upper");
        }
    }
}

Bounds Bounds::centered(const std::vector<double> &centers,
                        const std::vector<double> &sds, double multiplier) {
    if (centers.size() != sds.size()) {
        throw ShapeError("Bounds::centered: " + std::to_string(centers.size()) +
                         " centers but " + std::to_string(sds.size()) + " sds");
    }
    if (!(multiplier > 0.0)) {
        throw DomainError("Bounds::centered: multiplier must be > 0");
    }
    std::vector<std::pair<double, double>> limits;
    limits.reserve(centers.size());
    for (std::size_t j = 0; j < centers.size(); ++j) {
        if (!(sds[j] > 0.0)) {
            throw DomainError("Bounds::centered: sds must be > 0");
        }
        limits.emplace_back(centers[j] - multiplier * sds[j],
                            centers[j] + multiplier * sds[j]);
    }
    return Bounds(std::move(limits));
}

DataMatrix Bounds::clamp(const DataMatrix &x) const {
    if (x.cols() != dims()) {
        throw ShapeError("Bounds::clamp: data has " + std::to_string(x.cols()) +
                         " columns, bounds have " + std::to_string(dims()));
    }
    std::vector<double> values = x.values();
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            double &v = values[i * x.cols() + j];
            v = std::min(std::max(v, lower(j)), upper(j));
        }
    }
    return DataMatrix(std::move(values), x.rows(), x.column_names());
}

bool Bounds::contains(const DataMatrix &x) const {
    if (x.cols() != dims()) {
        return false;
    }
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            if (x(i, j) < lower(j) || x(i, j) > upper(j)) {
                return false;
            }
        }
    }
    return true;
}

double laplace_noise(double scale, RandomSource &rng) {
    if (!(scale > 0.0)) {
        throw DomainError("laplace_noise: scale must be > 0");
    }
    return rng.laplace(scale);
}

namespace {

// Largest minus smallest value of x*y over the corner set of [lo1,hi1]x[lo2,hi2].
double product_range(double lo1, double hi1, double lo2, double hi2) {
    const double c[4] = {lo1 * lo2, lo1 * hi2, hi1 * lo2, hi1 * hi2};
    double mn = c[0], mx = c[0];
    for (double v : c) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    // x*y attains 0 inside the box when either interval straddles zero.
    if ((lo1 < 0.0 && hi1 > 0.0) || (lo2 < 0.0 && hi2 > 0.0)) {
        mn = std::min(mn, 0.0);
        mx = std::max(mx, 0.0);
    }
    return mx - mn;
}

// Range of x^2 over [lo, hi].
double square_range(double lo, double hi) {
    const double mx = std::max(lo * lo, hi * hi);
    const double mn = (lo < 0.0 && hi > 0.0) ? 0.0 : std::min(lo * lo, hi * hi);
    return mx - mn;
}

struct SufficientSums {
    double sx = 0.0, sx2 = 0.0, sy = 0.0, sxy = 0.0, sy2 = 0.0;
};

SufficientSums sufficient_sums(const DataMatrix &x) {
    SufficientSums s;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double a = x(i, 0);
        const double b = x(i, 1);
        s.sx += a;
        s.sx2 += a * a;
        s.sy += b;
        s.sxy += a * b;
        s.sy2 += b * b;
    }
    return s;
}

constexpr double kVarianceFloor = 1e-6;

// Draws (mu1, sd1, beta0, beta1, resid sd) from the conjugate posterior of the
// sequential Gaussian model given sufficient sums, with diffuse priors
// (p(mu, sigma^2) ~ 1/sigma^2 per stage). With `floors`, non-positive
// variance-like quantities are clamped so noisy sums stay usable.
models::ThetaVector draw_posterior_theta(double n, const SufficientSums &s,
                                         RandomSource &rng, bool floors) {
    const double mean1 = s.sx / n;
    double var1 = s.sx2 / n - mean1 * mean1;
    if (floors) {
        var1 = std::max(var1, kVarianceFloor);
    } else if (!(var1 > 0.0)) {
        throw DomainError("posterior draw: column 1 has no variance");
    }
    const double sigma1_sq = n * var1 / rng.chi_squared(n - 1);
    const double mu1 = rng.normal(mean1, std::sqrt(sigma1_sq / n));

    double sxx_c = s.sx2 - s.sx * s.sx / n;
    if (floors) {
        sxx_c = std::max(sxx_c, kVarianceFloor);
    } else if (!(sxx_c > 0.0)) {
        throw DomainError("posterior draw: degenerate regression design");
    }
    const double sxy_c = s.sxy - s.sx * s.sy / n;
    const double beta1_hat = sxy_c / sxx_c;
    const double beta0_hat = (s.sy - beta1_hat * s.sx) / n;
    double rss = s.sy2 - s.sy * s.sy / n - beta1_hat * sxy_c;
    if (floors) {
        rss = std::max(rss, kVarianceFloor);
    } else {
        rss = std::max(rss, 0.0);
        if (rss == 0.0) {
            rss = kVarianceFloor;  // exact fit; keep the draw proper
        }
    }
    const double sigma_sq = rss / rng.chi_squared(n - 2);

    // beta | sigma^2 ~ N(beta_hat, sigma^2 (X'X)^-1) via a 2x2 Cholesky.
    // (X'X)^-1 = [[sx2, -sx], [-sx, n]] / det with det = n * sxx_c.
    const double det = n * sxx_c;
    const double c00 = sigma_sq * s.sx2 / det;
    const double c01 = sigma_sq * -s.sx / det;
    const double c11 = sigma_sq * n / det;
    const double l00 = std::sqrt(std::max(c00, 0.0));
    const double l10 = l00 > 0.0 ? c01 / l00 : 0.0;
    const double l11 = std::sqrt(std::max(c11 - l10 * l10, 0.0));
    const double z0 = rng.normal(0.0, 1.0);
    const double z1 = rng.normal(0.0, 1.0);
    const double beta0 = beta0_hat + l00 * z0;
    const double beta1 = beta1_hat + l10 * z0 + l11 * z1;

    return models::ThetaVector(
        {mu1, std::sqrt(sigma1_sq), beta0, beta1, std::sqrt(sigma_sq)});
}

void require_two_columns(const DataMatrix &x, const char *who) {
    if (x.cols() != 2) {
        throw ShapeError(std::string(who) +
                         ": sequential Gaussian synthesis expects 2 columns, got " +
                         std::to_string(x.cols()));
    }
}

}  // namespace

NoisyBppdPlan noisy_bppd_plan(const Bounds &bounds, double eps_draw) {
    if (bounds.dims() != 2) {
        throw ShapeError("noisy_bppd_plan: expected 2-column bounds");
    }
    if (!(eps_draw > 0.0)) {
        throw DomainError("noisy_bppd_plan: eps_draw must be > 0");
    }
    const double lo1 = bounds.lower(0), hi1 = bounds.upper(0);
    const double lo2 = bounds.lower(1), hi2 = bounds.upper(1);
    NoisyBppdPlan plan;
    // Changing one row moves each sum by at most the value range of its term.
    plan.sensitivity = {hi1 - lo1, square_range(lo1, hi1), hi2 - lo2,
                        product_range(lo1, hi1, lo2, hi2), square_range(lo2, hi2)};
    plan.eps_per_stat = eps_draw / 5.0;
    for (std::size_t k = 0; k < 5; ++k) {
        plan.scale[k] = plan.sensitivity[k] / plan.eps_per_stat;
    }
    return plan;
}

std::vector<DataMatrix> noisy_bppd_synthesize(const DataMatrix &x, const Bounds &bounds,
                                              double epsilon_total, std::size_t l,
                                              RandomSource &rng) {
    require_two_columns(x, "noisy_bppd_synthesize");
    if (!(epsilon_total > 0.0)) {
        throw DomainError("noisy_bppd_synthesize: epsilon_total must be > 0");
    }
    if (l < 1) {
        throw DomainError("noisy_bppd_synthesize: l must be >= 1");
    }
    const double n = static_cast<double>(x.rows());
    const DataMatrix clamped = bounds.clamp(x);
    const SufficientSums exact = sufficient_sums(clamped);
    const NoisyBppdPlan plan = noisy_bppd_plan(bounds, epsilon_total / l);

    std::vector<DataMatrix> out;
    out.reserve(l);
    for (std::size_t i = 0; i < l; ++i) {
        SufficientSums noisy = exact;
        noisy.sx += laplace_noise(plan.scale[0], rng);
        noisy.sx2 += laplace_noise(plan.scale[1], rng);
        noisy.sy += laplace_noise(plan.scale[2], rng);
        noisy.sxy += laplace_noise(plan.scale[3], rng);
        noisy.sy2 += laplace_noise(plan.scale[4], rng);
        const auto theta = draw_posterior_theta(n, noisy, rng, /*floors=*/true);
        auto synthetic =
            models::SequentialGaussianModel(x.rows()).sample(theta, x.rows(), rng);
        out.push_back(bounds.clamp(synthetic.renamed(x.column_names())));
    }
    return out;
}

SmoothHistogram::SmoothHistogram(Bounds bounds, std::vector<std::size_t> bins_per_dim,
                                 double lambda, std::vector<double> cell_probabilities)
    : bounds_(std::move(bounds)), bins_(std::move(bins_per_dim)), lambda_(lambda),
      probs_(std::move(cell_probabilities)) {
    std::size_t total = 1;
    for (std::size_t b : bins_) {
        total *= b;
    }
    if (total != probs_.size()) {
        throw ShapeError("SmoothHistogram: cell count mismatch");
    }
}

SmoothHistogram smooth_histogram_fit(const DataMatrix &x, const Bounds &bounds,
                                     const std::vector<std::size_t> &bins_per_dim,
                                     double epsilon, HistogramPrivacyUnit unit) {
    if (bounds.dims() != x.cols() || bins_per_dim.size() != x.cols()) {
        throw ShapeError("smooth_histogram_fit: bounds/bins dimension mismatch");
    }
    if (!(epsilon > 0.0)) {
        throw DomainError("smooth_histogram_fit: epsilon must be > 0");
    }
    for (std::size_t b : bins_per_dim) {
        if (b < 1) {
            throw DomainError("smooth_histogram_fit: bins_per_dim entries must be >= 1");
        }
    }
    if (!bounds.contains(x)) {
        throw DomainError(
            "smooth_histogram_fit: data outside bounds; truncate to the bounds first");
    }
    const std::size_t n = x.rows();
    const std::size_t q = x.cols();
    std::size_t total_cells = 1;
    for (std::size_t b : bins_per_dim) {
        total_cells *= b;
    }

    std::vector<std::size_t> counts(total_cells, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t cell = 0;
        for (std::size_t j = 0; j < q; ++j) {
            const double w = bounds.width(j) / static_cast<double>(bins_per_dim[j]);
            auto b = static_cast<std::size_t>((x(i, j) - bounds.lower(j)) / w);
            b = std::min(b, bins_per_dim[j] - 1);
            cell = cell * bins_per_dim[j] + b;
        }
        ++counts[cell];
    }

    // lambda at its lower bound K / (K + n (e^t - 1)); t is eps/n when each of
    // the n released samples must stay within budget, or eps for one release.
    const double t = unit == HistogramPrivacyUnit::kPerSample
                         ? epsilon / static_cast<double>(n)
                         : epsilon;
    const double k = static_cast<double>(total_cells);
    const double lambda = k / (k + static_cast<double>(n) * std::expm1(t));

    // Equal-width cells: P(cell) = (1-lambda) count/n + lambda/K.
    std::vector<double> probs(total_cells);
    for (std::size_t c = 0; c < total_cells; ++c) {
        probs[c] = (1.0 - lambda) * static_cast<double>(counts[c]) /
                       static_cast<double>(n) +
                   lambda / k;
    }
    return SmoothHistogram(bounds, bins_per_dim, lambda, std::move(probs));
}

DataMatrix smooth_histogram_sample(const SmoothHistogram &hist, std::size_t n_out,
                                   RandomSource &rng,
                                   std::vector<std::string> column_names) {
    if (n_out < 1) {
        throw DomainError("smooth_histogram_sample: n_out must be >= 1");
    }
    const auto &probs = hist.cell_probabilities();
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t c = 0; c < probs.size(); ++c) {
        acc += probs[c];
        cdf[c] = acc;
    }
    cdf.back() = 1.0;

    const std::size_t q = hist.bins_per_dim().size();
    if (column_names.empty()) {
        for (std::size_t j = 0; j < q; ++j) {
            column_names.push_back("x" + std::to_string(j + 1));
        }
    }
    std::vector<double> values(n_out * q);
    for (std::size_t i = 0; i < n_out; ++i) {
        const double u = rng.uniform01();
        const std::size_t cell = static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        // Unflatten the cell index, last dimension fastest.
        std::size_t rest = cell;
        for (std::size_t j = q; j-- > 0;) {
            const std::size_t bins = hist.bins_per_dim()[j];
            const std::size_t b = rest % bins;
            rest /= bins;
            const double w =
                hist.bounds().width(j) / static_cast<double>(bins);
            values[i * q + j] =
                hist.bounds().lower(j) + (static_cast<double>(b) + rng.uniform01()) * w;
        }
    }
    return DataMatrix(std::move(values), n_out, std::move(column_names));
}

std::vector<DataMatrix> nondp_bppd_synthesize(const DataMatrix &x, std::size_t l,
                                              RandomSource &rng) {
    require_two_columns(x, "nondp_bppd_synthesize");
    if (l < 1) {
        throw DomainError("nondp_bppd_synthesize: l must be >= 1");
    }
    if (x.rows() < 3) {
        throw DomainError("nondp_bppd_synthesize: need at least 3 rows");
    }
    const SufficientSums s = sufficient_sums(x);
    std::vector<DataMatrix> out;
    out.reserve(l);
    for (std::size_t i = 0; i < l; ++i) {
        const auto theta =
            draw_posterior_theta(static_cast<double>(x.rows()), s, rng, false);
        out.push_back(models::SequentialGaussianModel(x.rows())
                          .sample(theta, x.rows(), rng)
                          .renamed(x.column_names()));
    }
    return out;
}

}  // namespace dppmse::baselines
