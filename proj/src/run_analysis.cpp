#include "rbnsize/run_analysis.hpp"

#include <future>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rbnsize/rbn_codec.hpp"

namespace rbnsize {

namespace {

void check_range(int n, int lo, int hi, const char* what) {
    if (n < lo || n > hi) {
        throw std::out_of_range(std::string(what) + ": n=" + std::to_string(n) + " outside [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}

// Calls f(run_length) for each maximal run of ones in the low n bits of x.
template <typename F>
void for_each_run(std::uint32_t x, int n, F&& f) {
    int i = 0;
    while (i < n) {
        if (((x >> i) & 1U) == 0) {
            ++i;
            continue;
        }
        int k = 0;
        while (i < n && ((x >> i) & 1U)) {
            ++k;
            ++i;
        }
        f(k);
    }
}

}  // namespace

Rational Rational::make(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
}

std::string Rational::to_string() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

RunCountTable run_count_table(int n) {
    check_range(n, 1, kMaxTableBits, "run_count_table");
    RunCountTable table{n, std::vector<std::uint64_t>(static_cast<std::size_t>(n) + 1, 0)};
    const std::uint32_t total = 1U << n;
    for (std::uint32_t x = 0; x < total; ++x) {
        for_each_run(x, n, [&](int k) { ++table.rows[static_cast<std::size_t>(k)]; });
    }
    return table;
}

int max_runs(int n, int k) noexcept { return (n + 1) / (k + 1); }

OccurrenceCount occurrence_count(int n, int k, int runs) {
    check_range(n, 1, kMaxTableBits, "occurrence_count");
    if (k < 1 || k > n) throw std::out_of_range("occurrence_count: k outside [1, n]");
    if (runs < 1) throw std::out_of_range("occurrence_count: i_k must be >= 1");

    OccurrenceCount oc{n, k, runs, 0, 0};
    if (runs > max_runs(n, k)) return oc;
    const std::uint32_t total = 1U << n;
    for (std::uint32_t x = 0; x < total; ++x) {
        int hits = 0;
        for_each_run(x, n, [&](int len) { hits += (len == k); });
        oc.strings += (hits == runs);
    }
    oc.count = oc.strings * static_cast<std::uint64_t>(runs);
    return oc;
}

Rational formula_total_nonzeros(int n) {
    if (n < 1) throw std::out_of_range("formula_total_nonzeros: n must be >= 1");
    if (n > 60) throw std::out_of_range("formula_total_nonzeros: n too large for 64-bit arithmetic");
    if (n == 1) return Rational::make(3, 2);
    return Rational::make(static_cast<std::int64_t>(n + 2) << (n - 2), 1);
}

std::uint64_t measured_total_nonzeros(int n) {
    check_range(n, 0, kMaxMeasuredBits, "measured_total_nonzeros");
    if (n == 0) return 0;  // the only string is empty and encodes to a lone 0

    // Partition by the top prefix bits; each worker sums its own slice.
    const int prefix_bits = n >= 12 ? 4 : 0;
    const std::uint32_t slices = 1U << prefix_bits;
    const std::uint32_t per_slice = (1U << n) >> prefix_bits;
    std::vector<std::future<std::uint64_t>> parts;
    parts.reserve(slices);
    for (std::uint32_t s = 0; s < slices; ++s) {
        parts.push_back(std::async(std::launch::async, [=] {
            std::uint64_t sum = 0;
            for (std::uint32_t j = 0; j < per_slice; ++j) {
                const std::uint32_t x = s * per_slice + j;
                sum += weight(encode_rbn(BitString::from_uint(x, static_cast<std::size_t>(n))));
            }
            return sum;
        }));
    }
    std::uint64_t total = 0;
    for (auto& p : parts) total += p.get();
    return total;
}

Rational avg_nonzero_fraction(std::int64_t n) {
    if (n < 1) throw std::out_of_range("avg_nonzero_fraction: n must be >= 1");
    return Rational::make(n + 2, 4 * n);
}

std::vector<DeviationRow> nonzero_deviation_report(int n_max) {
    check_range(n_max, 1, kMaxMeasuredBits, "nonzero_deviation_report");
    std::vector<DeviationRow> rows;
    for (int n = 1; n <= n_max; ++n) {
        DeviationRow r;
        r.n = n;
        r.formula = formula_total_nonzeros(n);
        r.measured = measured_total_nonzeros(n);
        r.deviation = static_cast<double>(r.measured) - r.formula.to_double();
        r.relative_deviation = r.deviation / r.formula.to_double();
        rows.push_back(r);
    }
    return rows;
}

std::string run_table_csv(const RunCountTable& table) {
    std::ostringstream os;
    os << "k,max_runs,occurrences\n";
    for (int k = 1; k <= table.n; ++k) {
        os << k << ',' << max_runs(table.n, k) << ',' << table.at(k) << '\n';
    }
    return os.str();
}

std::string deviation_csv(const std::vector<DeviationRow>& rows) {
    std::ostringstream os;
    os.precision(10);
    os << "n,formula,measured,deviation,relative_deviation\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.formula.to_string() << ',' << r.measured << ',' << r.deviation << ','
           << r.relative_deviation << '\n';
    }
    return os.str();
}

}  // namespace rbnsize
