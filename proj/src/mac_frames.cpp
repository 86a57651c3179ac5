#include "rbnsize/mac_frames.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace rbnsize {

namespace {

constexpr std::uint32_t kCrcPolyReflected = 0xEDB88320U;

constexpr std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int b = 0; b < 8; ++b) c = (c & 1U) ? (c >> 1) ^ kCrcPolyReflected : c >> 1;
        t[i] = c;
    }
    return t;
}

constexpr auto kCrcTable = make_crc_table();

void put_octet(SymbolStream& out, std::uint8_t octet) {
    for (int b = 0; b < 8; ++b) out.push_back(((octet >> b) & 1U) ? 1 : -1);
}

void put_u16(SymbolStream& out, std::uint16_t v) {
    put_octet(out, static_cast<std::uint8_t>(v >> 8));
    put_octet(out, static_cast<std::uint8_t>(v & 0xFF));
}

void put_u32(SymbolStream& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) put_octet(out, static_cast<std::uint8_t>((v >> shift) & 0xFF));
}

void push_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void push_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
}

// Reads binary octets off a symbol stream; any symbol other than +/-1 marks
// the reader as failed.
class OctetReader {
public:
    explicit OctetReader(std::span<const std::int8_t> s, std::size_t pos = 0) : s_(s), pos_(pos) {}

    std::optional<std::uint8_t> octet() {
        std::uint8_t v = 0;
        for (int b = 0; b < 8; ++b) {
            const std::int8_t sym = s_[pos_++];
            if (sym == 1) {
                v |= static_cast<std::uint8_t>(1U << b);
            } else if (sym != -1) {
                return std::nullopt;
            }
        }
        return v;
    }

    std::optional<std::uint16_t> u16() {
        auto hi = octet();
        auto lo = octet();
        if (!hi || !lo) return std::nullopt;
        return static_cast<std::uint16_t>((*hi << 8) | *lo);
    }

    std::optional<std::uint32_t> u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            auto o = octet();
            if (!o) return std::nullopt;
            v = (v << 8) | *o;
        }
        return v;
    }

    std::optional<Address> address() {
        std::array<std::uint8_t, kAddressOctets> a{};
        for (auto& o : a) {
            auto v = octet();
            if (!v) return std::nullopt;
            o = *v;
        }
        return Address(a);
    }

    std::size_t pos() const noexcept { return pos_; }

private:
    std::span<const std::int8_t> s_;
    std::size_t pos_;
};

template <typename Frame>
ParseResult<Frame> fail(FrameError e, std::string detail) {
    ParseResult<Frame> r;
    r.error = e;
    r.detail = std::move(detail);
    return r;
}

bool check_pattern(OctetReader& rd, std::size_t octets) {
    for (std::size_t i = 0; i < octets; ++i) {
        auto o = rd.octet();
        if (!o || *o != kPreambleOctet) return false;
    }
    return true;
}

std::vector<std::uint8_t> control_crc_octets(const ControlFrame& f) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), f.dest.octets().begin(), f.dest.octets().end());
    out.insert(out.end(), f.src.octets().begin(), f.src.octets().end());
    out.push_back(static_cast<std::uint8_t>(static_cast<std::uint8_t>(f.type) << 6));
    push_u16(out, f.length);
    return out;
}

// Shared prefix of both frame kinds: preamble, addresses, type.
struct Prefix {
    Address dest;
    Address src;
    std::uint8_t type_code = 0;
};

template <typename Frame>
std::optional<ParseResult<Frame>> read_prefix(OctetReader& rd, std::span<const std::int8_t> symbols,
                                              std::size_t min_symbols, Prefix& out) {
    if (symbols.size() < min_symbols) {
        return fail<Frame>(FrameError::BadLength, "stream shorter than the fixed header");
    }
    if (!check_pattern(rd, kPreambleOctets)) return fail<Frame>(FrameError::BadPreamble, "preamble mismatch");
    auto dest = rd.address();
    auto src = rd.address();
    auto type_octet = rd.octet();
    if (!dest || !src || !type_octet) return fail<Frame>(FrameError::BadSymbol, "non-binary symbol in header");
    if ((*type_octet & 0x3FU) != 0) return fail<Frame>(FrameError::BadType, "reserved type bits set");
    out = Prefix{*dest, *src, static_cast<std::uint8_t>(*type_octet >> 6)};
    return std::nullopt;
}

}  // namespace

std::uint32_t crc32(const BitString& bits) {
    std::uint32_t crc = 0xFFFFFFFFU;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const bool lsb = ((crc ^ bits[i]) & 1U) != 0;
        crc >>= 1;
        if (lsb) crc ^= kCrcPolyReflected;
    }
    return crc ^ 0xFFFFFFFFU;
}

std::uint32_t crc32(std::span<const std::uint8_t> octets) {
    std::uint32_t crc = 0xFFFFFFFFU;
    for (auto o : octets) crc = kCrcTable[(crc ^ o) & 0xFFU] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFU;
}

Address Address::broadcast() {
    std::array<std::uint8_t, kAddressOctets> a{};
    a.fill(0xFF);
    return Address(a);
}

Address Address::from_index(std::uint16_t index) {
    std::array<std::uint8_t, kAddressOctets> a{};
    a[4] = static_cast<std::uint8_t>(index >> 8);
    a[5] = static_cast<std::uint8_t>(index & 0xFF);
    return Address(a);
}

Address Address::parse(std::string_view text) {
    std::string hex;
    for (char c : text) {
        if (c == ':' || c == '-') continue;
        if (!std::isxdigit(static_cast<unsigned char>(c))) {
            throw std::invalid_argument("address: invalid character in '" + std::string(text) + "'");
        }
        hex.push_back(c);
    }
    if (hex.size() != 2 * kAddressOctets) {
        throw std::invalid_argument("address: expected 6 octets in '" + std::string(text) + "'");
    }
    std::array<std::uint8_t, kAddressOctets> a{};
    for (std::size_t i = 0; i < kAddressOctets; ++i) {
        a[i] = static_cast<std::uint8_t>(std::stoul(hex.substr(2 * i, 2), nullptr, 16));
    }
    return Address(a);
}

bool Address::is_broadcast() const noexcept {
    return std::all_of(octets_.begin(), octets_.end(), [](std::uint8_t o) { return o == 0xFF; });
}

std::string Address::to_string() const {
    std::string out;
    char buf[4];
    for (std::size_t i = 0; i < octets_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%02X", octets_[i]);
        if (i) out.push_back(':');
        out += buf;
    }
    return out;
}

std::string_view to_string(FrameType type) noexcept {
    switch (type) {
        case FrameType::Data: return "DATA";
        case FrameType::Rts: return "RTS";
        case FrameType::Cts: return "CTS";
        case FrameType::Ack: return "ACK";
    }
    return "?";
}

std::string_view to_string(FrameError error) noexcept {
    switch (error) {
        case FrameError::None: return "None";
        case FrameError::BadPreamble: return "BadPreamble";
        case FrameError::BadSync: return "BadSync";
        case FrameError::BadLength: return "BadLength";
        case FrameError::BadType: return "BadType";
        case FrameError::BadSymbol: return "BadSymbol";
        case FrameError::CrcMismatch: return "CrcMismatch";
    }
    return "?";
}

std::size_t data_frame_symbols(std::size_t payload_octets) noexcept {
    return kDataHeaderSymbols + 8 * payload_octets + 1 + kTrailerSymbols;
}

std::size_t max_frame_symbols() noexcept { return data_frame_symbols(kMaxPayloadOctets); }

double max_frame_duration_us(const DeviceProfile& profile) {
    return static_cast<double>(max_frame_symbols()) * profile.symbol_duration_us;
}

BuiltFrame<DataFrame> build_data_frame(const Address& dest, const Address& src, const BitString& payload_bits) {
    if (payload_bits.size() % 8 != 0) throw std::invalid_argument("data frame: payload is not octet-aligned");
    if (payload_bits.size() / 8 > kMaxPayloadOctets) {
        throw std::invalid_argument("data frame: payload exceeds 1500 octets");
    }
    DataFrame f;
    f.dest = dest;
    f.src = src;
    f.length = static_cast<std::uint16_t>(payload_bits.size() / 8);
    f.payload_bits = payload_bits;
    f.payload = encode_rbn(payload_bits);
    f.checksum = crc32(payload_bits);

    SymbolStream s;
    s.reserve(data_frame_symbols(f.length));
    for (std::size_t i = 0; i < kPreambleOctets; ++i) put_octet(s, kPreambleOctet);
    for (auto o : dest.octets()) put_octet(s, o);
    for (auto o : src.octets()) put_octet(s, o);
    put_octet(s, static_cast<std::uint8_t>(static_cast<std::uint8_t>(FrameType::Data) << 6));
    put_u16(s, f.length);
    for (std::size_t i = 0; i < kSyncOctets; ++i) put_octet(s, kPreambleOctet);
    const auto& d = f.payload.digits();
    s.insert(s.end(), d.rbegin(), d.rend());
    put_u32(s, f.checksum);
    return {std::move(f), std::move(s)};
}

BuiltFrame<DataFrame> build_data_frame(const Address& dest, const Address& src,
                                       std::span<const std::uint8_t> payload_octets) {
    return build_data_frame(dest, src, BitString::from_octets(payload_octets));
}

ParseResult<DataFrame> parse_data_frame(std::span<const std::int8_t> symbols) {
    OctetReader rd(symbols);
    Prefix pre;
    if (auto err = read_prefix<DataFrame>(rd, symbols, kDataHeaderSymbols, pre)) return *err;
    if (pre.type_code != static_cast<std::uint8_t>(FrameType::Data)) {
        return fail<DataFrame>(FrameError::BadType, "type code is not DATA");
    }
    auto length = rd.u16();
    if (!length) return fail<DataFrame>(FrameError::BadSymbol, "non-binary symbol in length field");
    if (*length > kMaxPayloadOctets) return fail<DataFrame>(FrameError::BadLength, "length exceeds 1500 octets");
    if (!check_pattern(rd, kSyncOctets)) return fail<DataFrame>(FrameError::BadSync, "sync mismatch");

    const std::size_t expected = data_frame_symbols(*length);
    if (symbols.size() != expected) {
        return fail<DataFrame>(FrameError::BadLength, "stream has " + std::to_string(symbols.size()) +
                                                          " symbols, length field implies " +
                                                          std::to_string(expected));
    }

    const std::size_t digits = 8 * static_cast<std::size_t>(*length) + 1;
    const std::size_t payload_at = rd.pos();
    std::vector<std::int8_t> lsb_first(digits);
    for (std::size_t i = 0; i < digits; ++i) {
        const std::int8_t sym = symbols[payload_at + digits - 1 - i];
        if (sym < -1 || sym > 1) return fail<DataFrame>(FrameError::CrcMismatch, "garbled payload symbol");
        lsb_first[i] = sym;
    }
    OctetReader trailer(symbols, payload_at + digits);
    auto checksum = trailer.u32();
    if (!checksum) return fail<DataFrame>(FrameError::BadSymbol, "non-binary symbol in checksum");

    DataFrame f;
    f.dest = pre.dest;
    f.src = pre.src;
    f.length = *length;
    f.payload = RbnString(std::move(lsb_first));
    f.checksum = *checksum;
    try {
        f.payload_bits = decode_rbn(f.payload);
    } catch (const RbnError& e) {
        return fail<DataFrame>(FrameError::CrcMismatch, std::string("payload does not decode: ") + e.what());
    }
    if (crc32(f.payload_bits) != f.checksum) {
        return fail<DataFrame>(FrameError::CrcMismatch, "checksum differs from decoded payload");
    }
    // Re-tag as canonical: it decoded, and encoding the decoded bits is unique.
    f.payload = encode_rbn(f.payload_bits);
    ParseResult<DataFrame> r;
    r.frame = std::move(f);
    return r;
}

BuiltFrame<ControlFrame> build_control_frame(FrameType type, const Address& dest, const Address& src,
                                             std::uint16_t length) {
    if (type == FrameType::Data) throw std::invalid_argument("control frame: type 00 is reserved for data");
    ControlFrame f{type, dest, src, length, 0};
    f.checksum = crc32(control_crc_octets(f));

    SymbolStream s;
    s.reserve(kControlSymbols);
    for (std::size_t i = 0; i < kPreambleOctets; ++i) put_octet(s, kPreambleOctet);
    for (auto o : dest.octets()) put_octet(s, o);
    for (auto o : src.octets()) put_octet(s, o);
    put_octet(s, static_cast<std::uint8_t>(static_cast<std::uint8_t>(type) << 6));
    put_u16(s, length);
    put_u32(s, f.checksum);
    return {f, std::move(s)};
}

ParseResult<ControlFrame> parse_control_frame(std::span<const std::int8_t> symbols) {
    OctetReader rd(symbols);
    Prefix pre;
    if (auto err = read_prefix<ControlFrame>(rd, symbols, kControlSymbols, pre)) return *err;
    if (pre.type_code == static_cast<std::uint8_t>(FrameType::Data)) {
        return fail<ControlFrame>(FrameError::BadType, "type 00 is a data frame");
    }
    if (symbols.size() != kControlSymbols) {
        return fail<ControlFrame>(FrameError::BadLength, "control frame must be 168 symbols");
    }
    auto length = rd.u16();
    auto checksum = rd.u32();
    if (!length || !checksum) return fail<ControlFrame>(FrameError::BadSymbol, "non-binary symbol in control frame");
    ControlFrame f{static_cast<FrameType>(pre.type_code), pre.dest, pre.src, *length, *checksum};
    if (crc32(control_crc_octets(f)) != f.checksum) {
        return fail<ControlFrame>(FrameError::CrcMismatch, "control checksum mismatch");
    }
    ParseResult<ControlFrame> r;
    r.frame = f;
    return r;
}

ParseResult<AnyFrame> parse_frame(std::span<const std::int8_t> symbols) {
    OctetReader rd(symbols);
    Prefix pre;
    if (auto err = read_prefix<AnyFrame>(rd, symbols, kControlSymbols, pre)) return *err;
    ParseResult<AnyFrame> out;
    auto lift = [&out](auto&& r) {
        out.error = r.error;
        out.detail = std::move(r.detail);
        if (r.frame) out.frame = AnyFrame(std::move(*r.frame));
    };
    if (pre.type_code == static_cast<std::uint8_t>(FrameType::Data)) {
        lift(parse_data_frame(symbols));
    } else {
        lift(parse_control_frame(symbols));
    }
    return out;
}

std::vector<std::uint8_t> frame_octets(const DataFrame& f) {
    std::vector<std::uint8_t> out(kPreambleOctets, kPreambleOctet);
    out.insert(out.end(), f.dest.octets().begin(), f.dest.octets().end());
    out.insert(out.end(), f.src.octets().begin(), f.src.octets().end());
    out.push_back(static_cast<std::uint8_t>(static_cast<std::uint8_t>(FrameType::Data) << 6));
    push_u16(out, f.length);
    out.insert(out.end(), kSyncOctets, kPreambleOctet);
    const auto payload = f.payload_bits.to_octets();
    out.insert(out.end(), payload.begin(), payload.end());
    push_u32(out, f.checksum);
    return out;
}

std::vector<std::uint8_t> frame_octets(const ControlFrame& f) {
    std::vector<std::uint8_t> out(kPreambleOctets, kPreambleOctet);
    const auto body = control_crc_octets(f);
    out.insert(out.end(), body.begin(), body.end());
    push_u32(out, f.checksum);
    return out;
}

SymbolStream symbols_from_image(std::span<const std::uint8_t> image) {
    constexpr std::size_t type_at = kPreambleOctets + 2 * kAddressOctets;
    if (image.size() <= type_at) throw std::invalid_argument("frame image shorter than its header");
    SymbolStream s;
    const bool data = (image[type_at] >> 6) == static_cast<std::uint8_t>(FrameType::Data);
    if (!data) {
        for (auto o : image) put_octet(s, o);
        return s;
    }
    if (image.size() < kDataHeaderOctets + kCrcOctets) throw std::invalid_argument("data frame image too short");
    for (std::size_t i = 0; i < kDataHeaderOctets; ++i) put_octet(s, image[i]);
    const auto payload = image.subspan(kDataHeaderOctets, image.size() - kDataHeaderOctets - kCrcOctets);
    const RbnString enc = encode_rbn(BitString::from_octets(payload));
    const auto& d = enc.digits();
    s.insert(s.end(), d.rbegin(), d.rend());
    for (auto o : image.last(kCrcOctets)) put_octet(s, o);
    return s;
}

std::string symbols_to_text(std::span<const std::int8_t> symbols) {
    std::string out;
    out.reserve(symbols.size());
    for (auto s : symbols) {
        out.push_back(s == 1 ? '+' : s == 0 ? '0' : s == -1 ? '-' : 'x');
    }
    return out;
}

SymbolStream symbols_from_text(std::string_view text) {
    SymbolStream out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '+': out.push_back(1); break;
            case '0': out.push_back(0); break;
            case '-': out.push_back(-1); break;
            case 'x': out.push_back(kGarbledSymbol); break;
            default:
                if (!std::isspace(static_cast<unsigned char>(c))) {
                    throw std::invalid_argument(std::string("symbol text: invalid character '") + c + "'");
                }
        }
    }
    return out;
}

std::string hex_dump(std::span<const std::uint8_t> octets) {
    std::string out;
    char buf[4];
    for (std::size_t i = 0; i < octets.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%02X", octets[i]);
        out += buf;
        out.push_back((i % 16 == 15 || i + 1 == octets.size()) ? '\n' : ' ');
    }
    return out;
}

std::vector<std::uint8_t> parse_hex(std::string_view text) {
    std::vector<std::uint8_t> out;
    std::string digits;
    for (char c : text) {
        if (std::isxdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            throw std::invalid_argument(std::string("hex: invalid character '") + c + "'");
        }
    }
    if (digits.size() % 2 != 0) throw std::invalid_argument("hex: odd number of digits");
    for (std::size_t i = 0; i < digits.size(); i += 2) {
        out.push_back(static_cast<std::uint8_t>(std::stoul(digits.substr(i, 2), nullptr, 16)));
    }
    return out;
}

}  // namespace rbnsize
