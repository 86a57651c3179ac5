#include "rbnsize/rbn_codec.hpp"

#include <algorithm>
#include <cctype>

namespace rbnsize {

namespace {

constexpr std::string_view kMacron = "\xCC\x84";  // U+0304 COMBINING MACRON

}  // namespace

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_) {
        if (b > 1) throw RbnError("BitString: element is not 0 or 1");
    }
}

BitString::BitString(std::size_t n, std::uint8_t fill) : bits_(n, fill) {
    if (fill > 1) throw RbnError("BitString: fill is not 0 or 1");
}

BitString BitString::from_uint(std::uint64_t value, std::size_t width) {
    std::vector<std::uint8_t> bits(width, 0);
    for (std::size_t i = 0; i < width && i < 64; ++i) bits[i] = (value >> i) & 1U;
    return BitString(std::move(bits));
}

BitString BitString::from_text(std::string_view text) {
    std::vector<std::uint8_t> msb_first;
    msb_first.reserve(text.size());
    for (char c : text) {
        if (c == '0' || c == '1') {
            msb_first.push_back(static_cast<std::uint8_t>(c - '0'));
        } else if (!std::isspace(static_cast<unsigned char>(c)) && c != '_') {
            throw RbnError(std::string("BitString: invalid character '") + c + "'");
        }
    }
    std::reverse(msb_first.begin(), msb_first.end());
    return BitString(std::move(msb_first));
}

BitString BitString::from_octets(std::span<const std::uint8_t> octets) {
    std::vector<std::uint8_t> bits;
    bits.reserve(octets.size() * 8);
    for (auto o : octets) {
        for (int b = 0; b < 8; ++b) bits.push_back((o >> b) & 1U);
    }
    return BitString(std::move(bits));
}

std::size_t BitString::popcount() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::string BitString::to_text() const {
    std::string out;
    out.reserve(bits_.size());
    for (auto it = bits_.rbegin(); it != bits_.rend(); ++it) out.push_back(static_cast<char>('0' + *it));
    return out;
}

std::vector<std::uint8_t> BitString::to_octets() const {
    if (bits_.size() % 8 != 0) throw RbnError("BitString: length is not a multiple of 8");
    std::vector<std::uint8_t> out(bits_.size() / 8, 0);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        out[i / 8] |= static_cast<std::uint8_t>(bits_[i] << (i % 8));
    }
    return out;
}

BitString BitString::slice(std::size_t pos, std::size_t len) const {
    if (pos > bits_.size()) throw RbnError("BitString: slice out of range");
    len = std::min(len, bits_.size() - pos);
    return BitString(std::vector<std::uint8_t>(bits_.begin() + static_cast<std::ptrdiff_t>(pos),
                                               bits_.begin() + static_cast<std::ptrdiff_t>(pos + len)));
}

RbnString::RbnString(std::vector<std::int8_t> digits, bool canonical)
    : digits_(std::move(digits)), canonical_(canonical) {
    for (auto d : digits_) {
        if (d < -1 || d > 1) throw RbnError("RbnString: digit outside {-1, 0, 1}");
    }
}

RbnString RbnString::from_text(std::string_view text) {
    std::vector<std::int8_t> msb_first;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '0') {
            msb_first.push_back(0);
        } else if (c == '1') {
            if (text.substr(i + 1, kMacron.size()) == kMacron) {
                msb_first.push_back(-1);
                i += kMacron.size();
            } else {
                msb_first.push_back(1);
            }
        } else if (c == 'T' || c == 't') {
            msb_first.push_back(-1);
        } else if (!std::isspace(static_cast<unsigned char>(c)) && c != '_') {
            throw RbnError("RbnString: invalid text near offset " + std::to_string(i));
        }
    }
    std::reverse(msb_first.begin(), msb_first.end());
    return RbnString(std::move(msb_first));
}

std::string RbnString::to_text(bool ascii) const {
    std::string out;
    out.reserve(digits_.size() * 2);
    for (auto it = digits_.rbegin(); it != digits_.rend(); ++it) {
        switch (*it) {
            case 0: out.push_back('0'); break;
            case 1: out.push_back('1'); break;
            default:
                if (ascii) {
                    out.push_back('T');
                } else {
                    out.push_back('1');
                    out.append(kMacron);
                }
        }
    }
    return out;
}

RbnString replace_runs(const BitString& input) {
    const std::size_t n = input.size();
    std::vector<std::int8_t> out(n + 1, 0);
    std::size_t i = 0;
    while (i < n) {
        if (input[i] == 0) {
            ++i;
            continue;
        }
        std::size_t k = 1;
        while (i + k < n && input[i + k] == 1) ++k;
        if (k == 1) {
            out[i] = 1;
        } else {
            // 2^i + ... + 2^(i+k-1) = 2^(i+k) - 2^i
            out[i] = -1;
            out[i + k] = 1;
        }
        i += k;
    }
    return RbnString(std::move(out));
}

RbnString fold_pairs(const RbnString& input) {
    std::vector<std::int8_t> d = input.digits();
    for (std::size_t p = 0; p + 1 < d.size(); ++p) {
        // -2^(p+1) + 2^p = -2^p
        if (d[p + 1] == -1 && d[p] == 1) {
            d[p + 1] = 0;
            d[p] = -1;
        }
    }
    return RbnString(std::move(d));
}

bool has_canonical_shape(const RbnString& input) noexcept {
    const auto& d = input.digits();
    for (std::size_t p = 0; p + 1 < d.size(); ++p) {
        if (d[p] != 0 && d[p] == -d[p + 1]) return false;
    }
    return true;
}

RbnString encode_rbn(const BitString& input) {
    RbnString folded = fold_pairs(replace_runs(input));
    if (!has_canonical_shape(folded)) {
        throw RbnError("encode_rbn: opposite-sign adjacency survived the fold pass");
    }
    return RbnString(folded.digits(), true);
}

BitString decode_rbn(const RbnString& input) {
    if (input.empty()) return {};
    if (!has_canonical_shape(input)) {
        throw RbnError("decode_rbn: adjacent opposite-sign digits; not encoder output");
    }
    std::vector<std::uint8_t> out(input.size(), 0);
    bool runflag = false;
    for (std::size_t i = 0; i < input.size(); ++i) {
        switch (input[i]) {
            case -1:
                out[i] = runflag ? 0 : 1;
                runflag = true;
                break;
            case 1:
                out[i] = runflag ? 0 : 1;
                runflag = false;
                break;
            default:
                out[i] = runflag ? 1 : 0;
        }
    }
    if (runflag) throw RbnError("decode_rbn: run left open at the msb (negative value)");
    if (out.back() != 0) throw RbnError("decode_rbn: carry slot decodes to 1; value exceeds frame width");
    out.pop_back();
    return BitString(std::move(out));
}

BigInt value_of_bits(const BitString& input) {
    BigInt v = 0;
    for (std::size_t i = input.size(); i-- > 0;) {
        v <<= 1;
        v += input[i];
    }
    return v;
}

BigInt value_of_rbn(const RbnString& input) {
    BigInt v = 0;
    for (std::size_t i = input.size(); i-- > 0;) {
        v <<= 1;
        v += input[i];
    }
    return v;
}

std::size_t weight(const RbnString& input) noexcept {
    const auto& d = input.digits();
    return static_cast<std::size_t>(d.size() - static_cast<std::size_t>(std::count(d.begin(), d.end(), std::int8_t{0})));
}

}  // namespace rbnsize
