#include "dppmse/rng.hpp"

#include <cmath>

#include "dppmse/errors.hpp"

namespace dppmse {

double RandomSource::normal(double mean, double sd) {
    if (sd < 0.0) {
        throw DomainError("normal: standard deviation must be >= 0");
    }
    if (sd == 0.0) {
        return mean;
    }
    std::normal_distribution<double> dist(mean, sd);
    return dist(engine_);
}

double RandomSource::laplace(double scale) {
    if (!(scale > 0.0)) {
        throw DomainError("laplace: scale must be > 0");
    }
    // Inverse CDF on u in (0,1); endpoints excluded so the log stays finite.
    double u;
    do {
        u = uniform01();
    } while (u == 0.0);
    const double v = u - 0.5;
    return -scale * std::copysign(std::log1p(-2.0 * std::abs(v)), v);
}

double RandomSource::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) {
        throw DomainError("gamma: shape and scale must be > 0");
    }
    std::gamma_distribution<double> dist(shape, scale);
    return dist(engine_);
}

std::uint64_t RandomSource::uniform_index(std::uint64_t bound) {
    if (bound == 0) {
        throw DomainError("uniform_index: bound must be > 0");
    }
    std::uniform_int_distribution<std::uint64_t> dist(0, bound - 1);
    return dist(engine_);
}

}  // namespace dppmse
