#include "dppmse/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dppmse/errors.hpp"

namespace dppmse {

namespace {

std::vector<std::string> split_line(const std::string &line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

std::string trim(const std::string &s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

}  // namespace

DataMatrix read_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path.string() + "' for reading");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("'" + path.string() + "' is empty; expected a header row");
    }
    std::vector<std::string> names;
    for (const auto &cell : split_line(line)) {
        names.push_back(trim(cell));
    }
    const std::size_t q = names.size();

    std::vector<double> values;
    std::size_t data_row = 0;
    while (std::getline(in, line)) {
        if (line.empty() && in.peek() == std::ifstream::traits_type::eof()) {
            break;  // trailing newline
        }
        ++data_row;
        const auto cells = split_line(line);
        if (cells.size() != q) {
            throw ShapeError("'" + path.string() + "' row " + std::to_string(data_row) +
                             " has " + std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(q));
        }
        for (std::size_t j = 0; j < q; ++j) {
            const std::string cell = trim(cells[j]);
            double v = 0.0;
            const char *first = cell.data();
            const char *last = cell.data() + cell.size();
            const auto res = std::from_chars(first, last, v);
            if (res.ec != std::errc() || res.ptr != last || cell.empty() ||
                !std::isfinite(v)) {
                throw ParseError("'" + path.string() + "': cell \"" + cell +
                                     "\" at row " + std::to_string(data_row) +
                                     ", column " + std::to_string(j + 1) +
                                     " is not a finite number",
                                 data_row, j + 1);
            }
            values.push_back(v);
        }
    }
    if (data_row == 0) {
        throw DomainError("'" + path.string() +
                          "' has a header but no data rows; at least one row required");
    }
    return DataMatrix(std::move(values), data_row, std::move(names));
}

void write_csv(const DataMatrix &x, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot open '" + path.string() + "' for writing");
    }
    const auto &names = x.column_names();
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (j) out << ',';
        out << names[j];
    }
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            if (j) out << ',';
            std::snprintf(buf, sizeof(buf), "%.15g", x(i, j));
            out << buf;
        }
        out << '\n';
    }
    if (!out) {
        throw ParseError("write failed for '" + path.string() + "'");
    }
}

}  // namespace dppmse
