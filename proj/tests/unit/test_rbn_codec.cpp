#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rbnsize/rbn_codec.hpp"

using namespace rbnsize;

namespace {

// Second implementation working on msb-left text: prepend the carry slot,
// rewrite each run "01..1" (k>1) to "10..0T", then fold "T1" -> "0T", both
// scanning from the right (lsb) end.
std::string text_oracle(const std::string& bits) {
    std::string s = "0" + bits;
    const std::size_t n = s.size();
    std::size_t i = n;
    while (i > 0) {
        if (s[i - 1] != '1') {
            --i;
            continue;
        }
        std::size_t j = i;  // run is s[j-1 .. ] going left
        while (j > 0 && s[j - 1] == '1') --j;
        const std::size_t k = i - j;
        if (k > 1) {
            s[j - 1] = '1';
            for (std::size_t p = j; p < i - 1; ++p) s[p] = '0';
            s[i - 1] = 'T';
            i = j - 1;  // the separator became the carry
        } else {
            i = j;
        }
    }
    for (std::size_t p = n - 1; p > 0; --p) {
        if (s[p - 1] == 'T' && s[p] == '1') {
            s[p - 1] = '0';
            s[p] = 'T';
        }
    }
    return s;
}

std::string bits_text(std::uint64_t x, int n) {
    std::string s;
    for (int i = n - 1; i >= 0; --i) s.push_back(((x >> i) & 1U) ? '1' : '0');
    return s;
}

int longest_run(std::uint64_t x) {
    int best = 0;
    for (int run = 0; x; x >>= 1) {
        run = (x & 1U) ? run + 1 : 0;
        best = std::max(best, run);
    }
    return best;
}

}  // namespace

TEST_CASE("worked examples") {
    struct Case {
        const char* bits;
        const char* rbn;
        unsigned value;
        std::size_t weight;
    };
    // from tests/oracle/rbn_oracle.py
    const Case cases[] = {
        {"110111", "100T00T", 55, 3},    {"111", "100T", 7, 2},          {"11011011", "100T00T0T", 219, 4},
        {"100010110", "01000110T0", 278, 4}, {"1011", "0110T", 11, 3}, {"11111111", "10000000T", 255, 2},
    };
    for (const auto& c : cases) {
        CAPTURE(c.bits);
        const auto in = BitString::from_text(c.bits);
        const auto out = encode_rbn(in);
        CHECK(out.to_text(true) == c.rbn);
        CHECK(out.canonical());
        CHECK(value_of_bits(in) == c.value);
        CHECK(value_of_rbn(out) == c.value);
        CHECK(weight(out) == c.weight);
        CHECK(decode_rbn(out) == in);
    }
    CHECK(encode_rbn(BitString::from_text("110111")).to_text() == "1001̄001̄");
}

TEST_CASE("run replacement before folding") {
    CHECK(replace_runs(BitString::from_text("111")).to_text(true) == "100T");
    CHECK(replace_runs(BitString::from_text("11011011")).to_text(true) == "10T10T10T");
    CHECK(fold_pairs(replace_runs(BitString::from_text("11011011"))).to_text(true) == "100T00T0T");
    CHECK(replace_runs(BitString::from_text("101")).to_text(true) == "0101");
    CHECK(replace_runs(BitString{}).size() == 1);
}

TEST_CASE("value and weight helpers") {
    CHECK(value_of_bits(BitString{}) == 0);
    CHECK(value_of_rbn(RbnString::from_text("100T")) == 7);
    CHECK(value_of_rbn(RbnString::from_text("100 1̄")) == 7);
    CHECK(value_of_rbn(RbnString::from_text("T")) == -1);
    CHECK(value_of_rbn(RbnString::from_text("0000")) == 0);
    CHECK(weight(RbnString::from_text("100T")) == 2);
    CHECK(weight(RbnString::from_text("000")) == 0);
}

TEST_CASE("text forms") {
    const auto r = RbnString::from_text("1t0T1̄");
    CHECK(r.to_text(true) == "1T0TT");
    CHECK(RbnString::from_text(r.to_text()) == r);
    CHECK(BitString::from_text("1_0 1").to_text() == "101");
    CHECK_THROWS_AS(BitString::from_text("102"), RbnError);
    CHECK_THROWS_AS(RbnString::from_text("12"), RbnError);
    CHECK_THROWS_AS(RbnString::from_text("1̅"), RbnError);
    CHECK_THROWS_AS(RbnString(std::vector<std::int8_t>{0, 3}), RbnError);
}

TEST_CASE("octet packing is lsb first") {
    const std::vector<std::uint8_t> oct{0x01, 0x80};
    const auto b = BitString::from_octets(oct);
    REQUIRE(b.size() == 16);
    CHECK(b[0] == 1);
    CHECK(b[15] == 1);
    CHECK(b.popcount() == 2);
    CHECK(b.to_octets() == oct);
    CHECK(BitString::from_uint(6, 4).to_text() == "0110");
    CHECK(b.slice(8, 100).size() == 8);
}

TEST_CASE("empty input") {
    const auto e = encode_rbn(BitString{});
    CHECK(e.size() == 1);
    CHECK(weight(e) == 0);
    CHECK(decode_rbn(e).empty());
    CHECK(decode_rbn(RbnString{}).empty());
}

TEST_CASE("decoder rejects strings the encoder cannot emit") {
    CHECK_THROWS_AS(decode_rbn(RbnString::from_text("1T")), RbnError);   // opposite adjacency
    CHECK_THROWS_AS(decode_rbn(RbnString::from_text("T0")), RbnError);   // run never closed
    CHECK_THROWS_AS(decode_rbn(RbnString::from_text("10")), RbnError);   // carry set without a run
    CHECK_THROWS_AS(decode_rbn(RbnString::from_text("0T1")), RbnError);
    CHECK_FALSE(has_canonical_shape(RbnString::from_text("01T")));
    CHECK(has_canonical_shape(RbnString::from_text("10T")));
}

TEST_CASE("exhaustive n <= 12 agrees with the text-rewriting oracle") {
    for (int n = 0; n <= 12; ++n) {
        for (std::uint64_t x = 0; x < (1ULL << n); ++x) {
            const std::string t = bits_text(x, n);
            REQUIRE(encode_rbn(BitString::from_text(t)).to_text(true) == text_oracle(t));
        }
    }
}

TEST_CASE("exhaustive n <= 16: round trip, canonical shape, value, weight") {
    for (int n = 1; n <= 16; ++n) {
        for (std::uint64_t x = 0; x < (1ULL << n); ++x) {
            const auto b = BitString::from_uint(x, static_cast<std::size_t>(n));
            const auto e = encode_rbn(b);
            REQUIRE(e.size() == b.size() + 1);
            REQUIRE(has_canonical_shape(e));
            REQUIRE(value_of_rbn(e) == x);
            REQUIRE(weight(e) <= b.popcount());
            if (longest_run(x) >= 3) REQUIRE(weight(e) < b.popcount());
            REQUIRE(fold_pairs(e) == e);
            REQUIRE(decode_rbn(e) == b);
        }
    }
}

TEST_CASE("random 1024-bit frames") {
    std::mt19937_64 rng(20240917);
    for (int t = 0; t < 1000; ++t) {
        std::vector<std::uint8_t> bits(1024);
        // vary the density so long runs show up too
        std::bernoulli_distribution biased(0.1 + 0.8 * (t % 9) / 8.0);
        for (auto& v : bits) v = biased(rng);
        const BitString b(bits);
        const auto e = encode_rbn(b);
        REQUIRE(has_canonical_shape(e));
        REQUIRE(value_of_rbn(e) == value_of_bits(b));
        REQUIRE(decode_rbn(e) == b);
    }
}

TEST_CASE("run of 1024 ones costs two symbols") {
    const auto e = encode_rbn(BitString(1024, 1));
    CHECK(weight(e) == 2);
    CHECK(e[0] == -1);
    CHECK(e[1024] == 1);
}
