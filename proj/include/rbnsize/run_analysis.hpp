#pragma once

// Exhaustive run-length statistics over all 2^n binary strings, and the
// closed-form non-zero totals they are compared against.

#include <cstdint>
#include <string>
#include <vector>

namespace rbnsize {

/// Exact non-negative fraction, always reduced.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational make(std::int64_t num, std::int64_t den);
    double to_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_integer() const noexcept { return den == 1; }
    std::string to_string() const;

    friend bool operator==(const Rational&, const Rational&) = default;
};

inline constexpr int kMaxTableBits = 24;
inline constexpr int kMaxMeasuredBits = 20;

/// rows[k] = number of maximal runs of exactly k ones over all length-n
/// strings; rows[0] is unused and always 0.
struct RunCountTable {
    int n = 0;
    std::vector<std::uint64_t> rows;

    std::uint64_t at(int k) const { return rows.at(static_cast<std::size_t>(k)); }
};

struct OccurrenceCount {
    int n = 0;
    int k = 0;
    int runs = 0;                 // i_k: runs of length k per string
    std::uint64_t strings = 0;    // strings holding exactly `runs` such runs
    std::uint64_t count = 0;      // runs * strings
};

RunCountTable run_count_table(int n);

/// Throws std::out_of_range outside 1 <= n <= 24, k >= 1, runs >= 1.
OccurrenceCount occurrence_count(int n, int k, int runs);

/// Largest possible number of length-k runs in an n-bit string, floor((n+1)/(k+1)).
int max_runs(int n, int k) noexcept;

/// (n + 2) * 2^(n - 2), exact; 3/2 at n = 1.
Rational formula_total_nonzeros(int n);

/// Sum of weight(encode_rbn(x)) over all 2^n strings, 0 <= n <= 20.
std::uint64_t measured_total_nonzeros(int n);

/// (n + 2) / (4n), the expected non-zero digit fraction of an n-bit frame.
Rational avg_nonzero_fraction(std::int64_t n);

struct DeviationRow {
    int n = 0;
    Rational formula;
    std::uint64_t measured = 0;
    double deviation = 0.0;           // measured - formula
    double relative_deviation = 0.0;  // deviation / formula
};

std::vector<DeviationRow> nonzero_deviation_report(int n_max);

std::string run_table_csv(const RunCountTable& table);
std::string deviation_csv(const std::vector<DeviationRow>& rows);

}  // namespace rbnsize
