#pragma once

// Binary <-> redundant-binary (RBN) recoding for silent-zero transmission.
//
// Both string types store digits least-significant first: index 0 is the
// lsb. Text forms are written msb-left, the way numbers are usually read.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace rbnsize {

using BigInt = boost::multiprecision::cpp_int;

class RbnError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Finite binary sequence, index 0 = least significant bit.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::vector<std::uint8_t> bits);
    BitString(std::size_t n, std::uint8_t fill);

    /// Low `width` bits of `value`.
    static BitString from_uint(std::uint64_t value, std::size_t width);
    /// msb-left text over {0,1}; whitespace and '_' are ignored.
    static BitString from_text(std::string_view text);
    /// Bit 0 of octet 0 becomes bit 0 of the string.
    static BitString from_octets(std::span<const std::uint8_t> octets);

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }
    std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

    std::size_t popcount() const noexcept;
    std::string to_text() const;
    /// Requires size() % 8 == 0.
    std::vector<std::uint8_t> to_octets() const;
    BitString slice(std::size_t pos, std::size_t len) const;

    friend bool operator==(const BitString&, const BitString&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

enum class RbnDigit : std::int8_t { Minus = -1, Zero = 0, Plus = 1 };

/// Sequence over {-1, 0, +1}, index 0 = lsb.
///
/// The canonical flag is only ever set by encode_rbn(); a canonical string
/// never holds two adjacent non-zero digits of opposite sign.
class RbnString {
public:
    RbnString() = default;
    explicit RbnString(std::vector<std::int8_t> digits, bool canonical = false);

    /// msb-left text over {0, 1, T, 1̄}. "1̄" is '1' followed by U+0304.
    static RbnString from_text(std::string_view text);

    std::size_t size() const noexcept { return digits_.size(); }
    bool empty() const noexcept { return digits_.empty(); }
    std::int8_t operator[](std::size_t i) const { return digits_[i]; }
    RbnDigit digit(std::size_t i) const { return static_cast<RbnDigit>(digits_[i]); }
    const std::vector<std::int8_t>& digits() const noexcept { return digits_; }
    bool canonical() const noexcept { return canonical_; }

    /// msb-left; -1 printed as "1̄", or "T" when ascii is set.
    std::string to_text(bool ascii = false) const;

    /// Digit-wise equality; the canonical flag is metadata and not compared.
    friend bool operator==(const RbnString& a, const RbnString& b) { return a.digits_ == b.digits_; }

private:
    std::vector<std::int8_t> digits_;
    bool canonical_ = false;
};

/// Run replacement: every maximal run of k > 1 ones starting at bit i becomes
/// +1 at i+k and -1 at i. Single lsb->msb pass over the input runs; output
/// always has input.size() + 1 digits.
RbnString replace_runs(const BitString& input);

/// One lsb->msb pass rewriting each adjacent (-1 at p+1, +1 at p) into
/// (0 at p+1, -1 at p).
RbnString fold_pairs(const RbnString& input);

/// fold_pairs(replace_runs(input)), flagged canonical.
RbnString encode_rbn(const BitString& input);

/// Inverse of encode_rbn using the receiver's runflag scan. Drops the carry
/// slot, so an (n+1)-digit input yields n bits. Throws RbnError on strings
/// that cannot have come from the encoder.
BitString decode_rbn(const RbnString& input);

/// True when no adjacent digits have opposite non-zero signs.
bool has_canonical_shape(const RbnString& input) noexcept;

BigInt value_of_bits(const BitString& input);
BigInt value_of_rbn(const RbnString& input);

/// Count of non-zero digits.
std::size_t weight(const RbnString& input) noexcept;

}  // namespace rbnsize
