#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dppmse/rng.hpp"

namespace dppmse {

/// Dense n x q matrix of finite reals with named columns. Immutable after
/// construction; safe to share across threads.
class DataMatrix {
public:
    /// `values` is row-major with rows * column_names.size() entries.
    /// Requires n >= 1, q >= 1 and every entry finite.
    DataMatrix(std::vector<double> values, std::size_t rows,
               std::vector<std::string> column_names);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double operator()(std::size_t row, std::size_t col) const {
        return values_[row * cols_ + col];
    }
    /// Bounds-checked access.
    double at(std::size_t row, std::size_t col) const;

    std::span<const double> row(std::size_t index) const {
        return {values_.data() + index * cols_, cols_};
    }
    const std::vector<double> &values() const { return values_; }
    const std::vector<std::string> &column_names() const { return names_; }

    /// Copies values into a per-column layout (used by the tree fitter).
    std::vector<std::vector<double>> columns() const;

    /// Same values, new column names (schema relabel; no data change).
    DataMatrix renamed(std::vector<std::string> column_names) const;

private:
    std::vector<double> values_;
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::string> names_;
};

/// Stacked original + synthetic rows with a binary membership label per row.
/// Exactly half the labels are 0 (original block) and half are 1 (synthetic).
class LabeledPool {
public:
    LabeledPool(DataMatrix predictors, std::vector<std::uint8_t> labels);

    const DataMatrix &predictors() const { return predictors_; }
    const std::vector<std::uint8_t> &labels() const { return labels_; }

    std::size_t size() const { return labels_.size(); }          // N = 2n
    std::size_t ones() const { return size() / 2; }              // n

private:
    DataMatrix predictors_;
    std::vector<std::uint8_t> labels_;
};

/// Stacks original rows (labeled 0) above synthetic rows (labeled 1).
/// Predictor rows are copied unmodified. Throws ShapeError on any dimension
/// mismatch, naming both dimensions.
LabeledPool stack_and_label(const DataMatrix &original, const DataMatrix &synthetic);

/// Returns a copy of `x` differing in exactly one row: independent Gaussian
/// noise with standard deviation `noise_sd` is added to every entry of
/// `row_index`. noise_sd == 0 returns an identical copy.
DataMatrix perturb_one_row(const DataMatrix &x, std::size_t row_index,
                           double noise_sd, RandomSource &rng);

}  // namespace dppmse
