#include <doctest.h>

#include <cstdint>
#include <stdexcept>

#include "rbnsize/run_analysis.hpp"

using namespace rbnsize;

namespace {

// Runs of exactly k ones over all n-bit strings, counted by position: a run
// touching one end of the string needs one bounding zero, an interior run
// two, a run filling the string none.
std::uint64_t closed_form(int n, int k) {
    if (k > n) return 0;
    if (k == n) return 1;
    std::uint64_t total = 2ULL << (n - k - 1);  // the two edge positions
    if (k <= n - 2) total += static_cast<std::uint64_t>(n - k - 1) << (n - k - 2);
    return total;
}

}  // namespace

TEST_CASE("run table for n = 8") {
    const auto t = run_count_table(8);
    const std::uint64_t expect[] = {320, 144, 64, 28, 12, 5, 2, 1};
    for (int k = 1; k <= 8; ++k) CHECK(t.at(k) == expect[k - 1]);
    CHECK(run_count_table(3).at(1) == 5);
    CHECK(run_count_table(3).at(2) == 2);
    CHECK(run_count_table(3).at(3) == 1);
    CHECK(run_count_table(1).at(1) == 1);
}

TEST_CASE("run table matches the edge/interior closed form, n <= 12") {
    for (int n = 1; n <= 12; ++n) {
        const auto t = run_count_table(n);
        for (int k = 1; k <= n; ++k) {
            CAPTURE(n);
            CAPTURE(k);
            CHECK(t.at(k) == closed_form(n, k));
        }
    }
}

TEST_CASE("sum of k * rows[k] counts every one bit") {
    for (int n = 1; n <= 20; ++n) {
        const auto t = run_count_table(n);
        std::uint64_t s = 0;
        for (int k = 1; k <= n; ++k) s += static_cast<std::uint64_t>(k) * t.at(k);
        CHECK(s == static_cast<std::uint64_t>(n) << (n - 1));
    }
}

TEST_CASE("occurrence counts") {
    // strings x runs reading; frozen from the Python oracle
    CHECK(occurrence_count(8, 2, 1).count == 97);
    CHECK(occurrence_count(8, 2, 2).count == 44);
    CHECK(occurrence_count(8, 2, 2).strings == 22);
    CHECK(occurrence_count(8, 2, 3).count == 3);
    CHECK(occurrence_count(3, 3, 1).count == 1);
    CHECK(occurrence_count(8, 2, 4).count == 0);
    CHECK(max_runs(8, 2) == 3);
    CHECK_THROWS_AS(occurrence_count(0, 1, 1), std::out_of_range);
    CHECK_THROWS_AS(occurrence_count(8, 0, 1), std::out_of_range);
    CHECK_THROWS_AS(occurrence_count(8, 2, 0), std::out_of_range);
    CHECK_THROWS_AS(occurrence_count(25, 2, 1), std::out_of_range);
}

TEST_CASE("occurrence counts sum to the table row, n <= 12") {
    for (int n = 1; n <= 12; ++n) {
        const auto t = run_count_table(n);
        for (int k = 1; k <= n; ++k) {
            std::uint64_t s = 0;
            for (int i = 1; i <= max_runs(n, k); ++i) s += occurrence_count(n, k, i).count;
            CHECK(s == t.at(k));
        }
    }
}

TEST_CASE("closed-form non-zero totals") {
    CHECK(formula_total_nonzeros(8) == Rational{640, 1});
    CHECK(formula_total_nonzeros(2) == Rational{4, 1});
    CHECK(formula_total_nonzeros(1) == Rational{3, 2});
    CHECK(formula_total_nonzeros(1).to_string() == "3/2");
    CHECK_THROWS(formula_total_nonzeros(0));
}

TEST_CASE("measured non-zero totals") {
    // tests/oracle/rbn_oracle.py, n = 0..16
    const std::uint64_t expect[] = {0,    1,     4,     11,    28,     67,     156,    356,   800,
                                    1776, 3904, 8512, 18432, 39680, 84992, 181248, 385024};
    for (int n = 0; n <= 16; ++n) {
        CAPTURE(n);
        CHECK(measured_total_nonzeros(n) == expect[n]);
    }
    CHECK(measured_total_nonzeros(2) == 4);
    CHECK_THROWS(measured_total_nonzeros(21));
    CHECK_THROWS(measured_total_nonzeros(-1));
}

TEST_CASE("average non-zero fraction") {
    CHECK(avg_nonzero_fraction(1024) == Rational::make(1026, 4096));
    CHECK(avg_nonzero_fraction(1024).to_double() == doctest::Approx(0.25049).epsilon(1e-4));
    CHECK(avg_nonzero_fraction(2) == Rational{1, 2});
    CHECK(avg_nonzero_fraction(1 << 20).to_double() == doctest::Approx(0.25).epsilon(1e-4));
}

TEST_CASE("deviation report") {
    const auto rows = nonzero_deviation_report(16);
    REQUIRE(rows.size() == 16);
    CHECK(rows[1].n == 2);
    CHECK(rows[1].deviation == 0.0);
    CHECK(rows[0].deviation == doctest::Approx(-0.5));
    for (std::size_t i = 2; i < rows.size(); ++i) CHECK(rows[i].deviation > 0.0);
    const auto csv = deviation_csv(rows);
    CHECK(csv.rfind("n,formula,measured,deviation,relative_deviation\n", 0) == 0);
    CHECK(csv.find("\n8,640,800,160,0.25\n") != std::string::npos);
}
