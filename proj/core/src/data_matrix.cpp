#include "dppmse/data_matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dppmse/errors.hpp"

namespace dppmse {

DataMatrix::DataMatrix(std::vector<double> values, std::size_t rows,
                       std::vector<std::string> column_names)
    : values_(std::move(values)), rows_(rows), cols_(column_names.size()),
      names_(std::move(column_names)) {
    if (rows_ < 1 || cols_ < 1) {
        throw ShapeError("DataMatrix requires at least 1 row and 1 column, got " +
                         std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    if (values_.size() != rows_ * cols_) {
        throw ShapeError("DataMatrix value count " + std::to_string(values_.size()) +
                         " does not match " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw DomainError("DataMatrix entries must be finite");
        }
    }
}

double DataMatrix::at(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= cols_) {
        throw std::out_of_range("DataMatrix index (" + std::to_string(row) + "," +
                                std::to_string(col) + ") outside " +
                                std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    return (*this)(row, col);
}

std::vector<std::vector<double>> DataMatrix::columns() const {
    std::vector<std::vector<double>> cols(cols_, std::vector<double>(rows_));
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            cols[j][i] = (*this)(i, j);
        }
    }
    return cols;
}

DataMatrix DataMatrix::renamed(std::vector<std::string> column_names) const {
    if (column_names.size() != cols_) {
        throw ShapeError("renamed: expected " + std::to_string(cols_) + " names, got " +
                         std::to_string(column_names.size()));
    }
    return DataMatrix(values_, rows_, std::move(column_names));
}

LabeledPool::LabeledPool(DataMatrix predictors, std::vector<std::uint8_t> labels)
    : predictors_(std::move(predictors)), labels_(std::move(labels)) {
    const std::size_t n_rows = predictors_.rows();
    if (labels_.size() != n_rows) {
        throw ShapeError("LabeledPool: " + std::to_string(n_rows) + " rows but " +
                         std::to_string(labels_.size()) + " labels");
    }
    if (n_rows % 2 != 0) {
        throw ShapeError("LabeledPool: row count must be even (N = 2n), got " +
                         std::to_string(n_rows));
    }
    std::size_t one_count = 0;
    for (std::uint8_t l : labels_) {
        if (l > 1) {
            throw DomainError("LabeledPool labels must be 0 or 1");
        }
        one_count += l;
    }
    if (one_count != n_rows / 2) {
        throw ShapeError("LabeledPool: expected " + std::to_string(n_rows / 2) +
                         " one-labels, got " + std::to_string(one_count));
    }
}

LabeledPool stack_and_label(const DataMatrix &original, const DataMatrix &synthetic) {
    if (original.cols() != synthetic.cols() || original.rows() != synthetic.rows()) {
        throw ShapeError("stack_and_label: original is " + std::to_string(original.rows()) +
                         "x" + std::to_string(original.cols()) + " but synthetic is " +
                         std::to_string(synthetic.rows()) + "x" +
                         std::to_string(synthetic.cols()));
    }
    const std::size_t n = original.rows();
    const std::size_t q = original.cols();
    std::vector<double> values;
    values.reserve(2 * n * q);
    values.insert(values.end(), original.values().begin(), original.values().end());
    values.insert(values.end(), synthetic.values().begin(), synthetic.values().end());
    std::vector<std::uint8_t> labels(2 * n, 0);
    for (std::size_t i = n; i < 2 * n; ++i) {
        labels[i] = 1;
    }
    return LabeledPool(DataMatrix(std::move(values), 2 * n, original.column_names()),
                       std::move(labels));
}

DataMatrix perturb_one_row(const DataMatrix &x, std::size_t row_index,
                           double noise_sd, RandomSource &rng) {
    if (row_index >= x.rows()) {
        throw std::out_of_range("perturb_one_row: row " + std::to_string(row_index) +
                                " outside matrix with " + std::to_string(x.rows()) +
                                " rows");
    }
    if (noise_sd < 0.0) {
        throw DomainError("perturb_one_row: noise_sd must be >= 0");
    }
    std::vector<double> values = x.values();
    for (std::size_t j = 0; j < x.cols(); ++j) {
        values[row_index * x.cols() + j] += rng.normal(0.0, noise_sd);
    }
    return DataMatrix(std::move(values), x.rows(), x.column_names());
}

}  // namespace dppmse
