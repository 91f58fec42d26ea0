#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dppmse/csv.hpp"
#include "dppmse/data_matrix.hpp"
#include "dppmse/errors.hpp"
#include "test_helpers.hpp"

using namespace dppmse;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string &name) {
    return fs::temp_directory_path() / ("dppmse_test_" + name);
}

}  // namespace

TEST_SUITE("dataset-core") {

TEST_CASE("DataMatrix validates shape and finiteness") {
    CHECK_THROWS_AS(DataMatrix({}, 0, {"a"}), ShapeError);
    CHECK_THROWS_AS(DataMatrix({1.0, 2.0}, 1, {"a"}), ShapeError);
    CHECK_THROWS_AS(DataMatrix({std::nan("")}, 1, {"a"}), DomainError);
    const auto m = testutil::matrix({{1.0, 2.0}, {3.0, 4.0}});
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 2);
    CHECK(m(1, 0) == 3.0);
    CHECK_THROWS_AS(m.at(2, 0), std::out_of_range);
}

TEST_CASE("stack_and_label basic construction") {
    const auto original = testutil::matrix({{1.0}, {2.0}});
    const auto synthetic = testutil::matrix({{3.0}, {4.0}});
    const auto pool = stack_and_label(original, synthetic);
    CHECK(pool.size() == 4);
    CHECK(pool.predictors()(0, 0) == 1.0);
    CHECK(pool.predictors()(1, 0) == 2.0);
    CHECK(pool.predictors()(2, 0) == 3.0);
    CHECK(pool.predictors()(3, 0) == 4.0);
    CHECK(pool.labels() == std::vector<std::uint8_t>{0, 0, 1, 1});
}

TEST_CASE("stack_and_label identity case keeps label layout") {
    const auto x = testutil::matrix({{5.0, 6.0}, {7.0, 8.0}});
    const auto pool = stack_and_label(x, x);
    CHECK(pool.labels() == std::vector<std::uint8_t>{0, 0, 1, 1});
    CHECK(pool.predictors()(0, 0) == pool.predictors()(2, 0));
    CHECK(pool.predictors()(1, 1) == pool.predictors()(3, 1));
}

TEST_CASE("stack_and_label rejects mismatched dimensions") {
    const auto a = testutil::matrix({{1, 2}, {3, 4}, {5, 6}});
    const auto b = testutil::matrix({{1, 2}, {3, 4}});
    CHECK_THROWS_WITH_AS(stack_and_label(a, b),
                         doctest::Contains("3x2"), ShapeError);
}

TEST_CASE("stack_and_label label counts hold on random inputs") {
    RandomSource rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        const auto n = 1 + rng.uniform_index(40);
        const auto q = 1 + rng.uniform_index(4);
        const auto a = testutil::random_matrix(n, q, rng);
        const auto b = testutil::random_matrix(n, q, rng);
        const auto pool = stack_and_label(a, b);
        std::size_t ones = 0;
        for (auto l : pool.labels()) {
            ones += l;
        }
        CHECK(ones == n);
        CHECK(pool.size() == 2 * n);
    }
}

TEST_CASE("perturb_one_row with zero noise is an exact copy") {
    RandomSource rng(5);
    const auto x = testutil::random_matrix(20, 3, rng);
    const auto y = perturb_one_row(x, 7, 0.0, rng);
    CHECK(x.values() == y.values());
}

TEST_CASE("perturb_one_row changes exactly one row") {
    RandomSource rng(6);
    const auto x = testutil::random_matrix(200, 2, rng, 10.0);
    const auto y = perturb_one_row(x, 13, 5.0, rng);
    REQUIRE(y.rows() == x.rows());
    REQUIRE(y.cols() == x.cols());
    std::size_t changed = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        bool differs = false;
        for (std::size_t j = 0; j < x.cols(); ++j) {
            differs = differs || x(i, j) != y(i, j);
        }
        changed += differs ? 1 : 0;
    }
    CHECK(changed == 1);
    CHECK(x(13, 0) != y(13, 0));
}

TEST_CASE("perturb_one_row is deterministic under a fixed seed") {
    RandomSource rng1(42);
    RandomSource rng2(42);
    const auto x = testutil::matrix({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
    const auto a = perturb_one_row(x, 1, 2.5, rng1);
    const auto b = perturb_one_row(x, 1, 2.5, rng2);
    CHECK(a.values() == b.values());
}

TEST_CASE("perturb_one_row rejects bad arguments") {
    RandomSource rng(1);
    const auto x = testutil::matrix({{1.0}});
    CHECK_THROWS_AS(perturb_one_row(x, 1, 1.0, rng), std::out_of_range);
    CHECK_THROWS_AS(perturb_one_row(x, 0, -1.0, rng), DomainError);
}

TEST_CASE("csv round trip preserves values at 15 significant digits") {
    RandomSource rng(77);
    const auto path = temp_file("roundtrip.csv");
    for (int rep = 0; rep < 10; ++rep) {
        const auto n = 1 + rng.uniform_index(30);
        std::vector<double> values(n * 3);
        for (auto &v : values) {
            // mix of scales, including values needing scientific notation
            const double mag = std::pow(10.0, static_cast<double>(rng.uniform_index(13)) - 6.0);
            v = rng.normal(0.0, mag);
        }
        const DataMatrix x(values, n, {"alpha", "beta", "gamma"});
        write_csv(x, path);
        const auto y = read_csv(path);
        REQUIRE(y.rows() == x.rows());
        REQUIRE(y.column_names() == x.column_names());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t j = 0; j < x.cols(); ++j) {
                CHECK(y(i, j) ==
                      doctest::Approx(x(i, j)).epsilon(1e-14));
            }
        }
    }
    fs::remove(path);
}

TEST_CASE("csv header-only file is rejected") {
    const auto path = temp_file("empty.csv");
    std::ofstream(path) << "a,b\n";
    CHECK_THROWS_AS(read_csv(path), DomainError);
    fs::remove(path);
}

TEST_CASE("csv parse error cites row and column") {
    const auto path = temp_file("bad.csv");
    std::ofstream(path) << "a,b\n1.5,2.5\nabc,3.5\n";
    try {
        read_csv(path);
        FAIL("expected ParseError");
    } catch (const ParseError &e) {
        CHECK(e.row() == 2);
        CHECK(e.column() == 1);
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
        CHECK(std::string(e.what()).find("column 1") != std::string::npos);
    }
    fs::remove(path);
}

TEST_CASE("csv ragged rows are a shape error") {
    const auto path = temp_file("ragged.csv");
    std::ofstream(path) << "a,b\n1,2\n3\n";
    CHECK_THROWS_AS(read_csv(path), ShapeError);
    fs::remove(path);
}

TEST_CASE("csv rejects non-finite cells") {
    const auto path = temp_file("inf.csv");
    std::ofstream(path) << "a\ninf\n";
    CHECK_THROWS_AS(read_csv(path), ParseError);
    fs::remove(path);
}

}  // TEST_SUITE
