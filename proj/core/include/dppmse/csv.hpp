#pragma once

#include <filesystem>

#include "dppmse/data_matrix.hpp"

namespace dppmse {

/// Reads a comma-separated file: one header row of column names, then numeric
/// rows (decimal notation, optional scientific exponent). Throws ParseError
/// with a 1-based (data row, column) location for non-numeric cells and
/// ShapeError for ragged rows.
DataMatrix read_csv(const std::filesystem::path &path);

/// Writes `x` with a header row; values serialized to 15 significant digits,
/// which round-trips losslessly through read_csv at that precision.
void write_csv(const DataMatrix &x, const std::filesystem::path &path);

}  // namespace dppmse
