#pragma once

// Small shared helpers for the unit suites.

#include <cstdint>
#include <string>
#include <vector>

#include "dppmse/data_matrix.hpp"
#include "dppmse/rng.hpp"

namespace testutil {

inline dppmse::DataMatrix matrix(std::vector<std::vector<double>> rows,
                                 std::vector<std::string> names = {}) {
    const std::size_t q = rows.at(0).size();
    if (names.empty()) {
        for (std::size_t j = 0; j < q; ++j) {
            names.push_back("x" + std::to_string(j + 1));
        }
    }
    std::vector<double> values;
    for (const auto &r : rows) {
        values.insert(values.end(), r.begin(), r.end());
    }
    return dppmse::DataMatrix(std::move(values), rows.size(), std::move(names));
}

inline dppmse::DataMatrix random_matrix(std::size_t n, std::size_t q,
                                        dppmse::RandomSource &rng,
                                        double sd = 1.0) {
    std::vector<double> values(n * q);
    for (auto &v : values) {
        v = rng.normal(0.0, sd);
    }
    std::vector<std::string> names;
    for (std::size_t j = 0; j < q; ++j) {
        names.push_back("x" + std::to_string(j + 1));
    }
    return dppmse::DataMatrix(std::move(values), n, std::move(names));
}

inline double mean(const std::vector<double> &v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double> &v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) {
        s += (x - m) * (x - m);
    }
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace testutil
