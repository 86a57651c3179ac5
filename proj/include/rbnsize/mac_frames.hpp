#pragma once

// RBNSiZeMAC wire formats.
//
// Data frame, in transmission order:
//   preamble(2) | dest(6) | src(6) | type(1) | length(2) | sync(2) | payload | crc(4)
// Control frame:
//   preamble(2) | dest(6) | src(6) | type(1) | length(2) | crc(4)
//
// Field sizes are octets. Binary octets go on air lsb-first with bit 1 as a
// +1 symbol and bit 0 as a -1 symbol, so every header and trailer symbol is
// energized. Multi-octet integers (length, crc) are big-endian. The 2-bit
// type code sits in the two high-order bits of its octet; the other six are
// reserved and zero. The payload is encode_rbn() of the payload bits,
// 8*length + 1 digits sent msb-first, where a zero digit is silence.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rbnsize/energy_model.hpp"
#include "rbnsize/rbn_codec.hpp"

namespace rbnsize {

/// On-air symbols in {-1, 0, +1}. Received streams may also carry
/// kGarbledSymbol where transmissions collided.
using SymbolStream = std::vector<std::int8_t>;

inline constexpr std::int8_t kGarbledSymbol = 2;

inline constexpr std::size_t kPreambleOctets = 2;
inline constexpr std::size_t kAddressOctets = 6;
inline constexpr std::size_t kTypeOctets = 1;
inline constexpr std::size_t kLengthOctets = 2;
inline constexpr std::size_t kSyncOctets = 2;
inline constexpr std::size_t kCrcOctets = 4;
inline constexpr std::size_t kMaxPayloadOctets = 1500;
inline constexpr std::uint8_t kPreambleOctet = 0xAA;  // 10101010

inline constexpr std::size_t kDataHeaderOctets =
    kPreambleOctets + 2 * kAddressOctets + kTypeOctets + kLengthOctets + kSyncOctets;  // 19
inline constexpr std::size_t kControlOctets =
    kPreambleOctets + 2 * kAddressOctets + kTypeOctets + kLengthOctets + kCrcOctets;  // 21
inline constexpr std::size_t kDataHeaderSymbols = 8 * kDataHeaderOctets;
inline constexpr std::size_t kTrailerSymbols = 8 * kCrcOctets;
inline constexpr std::size_t kControlSymbols = 8 * kControlOctets;

/// IEEE 802.3 CRC-32 (reflected, init and xorout 0xFFFFFFFF) over bits in
/// index order.
std::uint32_t crc32(const BitString& bits);
std::uint32_t crc32(std::span<const std::uint8_t> octets);

class Address {
public:
    Address() = default;
    explicit Address(std::array<std::uint8_t, kAddressOctets> octets) : octets_(octets) {}

    static Address broadcast();
    /// Ordinary address 00:00:00:00:hi:lo.
    static Address from_index(std::uint16_t index);
    /// "AA:BB:CC:DD:EE:FF" (':' or '-' separators, or none).
    static Address parse(std::string_view text);

    const std::array<std::uint8_t, kAddressOctets>& octets() const noexcept { return octets_; }
    bool is_group() const noexcept { return (octets_[0] & 0x80U) != 0; }
    bool is_broadcast() const noexcept;
    /// Whether a node owning `self` accepts a frame sent to this address.
    bool accepted_by(const Address& self) const noexcept { return is_broadcast() || *this == self; }
    std::string to_string() const;

    friend bool operator==(const Address&, const Address&) = default;
    friend auto operator<=>(const Address&, const Address&) = default;

private:
    std::array<std::uint8_t, kAddressOctets> octets_{};
};

enum class FrameType : std::uint8_t { Data = 0b00, Rts = 0b01, Cts = 0b10, Ack = 0b11 };

std::string_view to_string(FrameType type) noexcept;

struct DataFrame {
    Address dest;
    Address src;
    std::uint16_t length = 0;  // payload octets, before encoding
    BitString payload_bits;
    RbnString payload;         // 8*length + 1 digits
    std::uint32_t checksum = 0;

    friend bool operator==(const DataFrame&, const DataFrame&) = default;
};

struct ControlFrame {
    FrameType type = FrameType::Rts;
    Address dest;
    Address src;
    std::uint16_t length = 0;
    std::uint32_t checksum = 0;

    friend bool operator==(const ControlFrame&, const ControlFrame&) = default;
};

enum class FrameError { None, BadPreamble, BadSync, BadLength, BadType, BadSymbol, CrcMismatch };

std::string_view to_string(FrameError error) noexcept;

template <typename Frame>
struct ParseResult {
    std::optional<Frame> frame;
    FrameError error = FrameError::None;
    std::string detail;

    bool ok() const noexcept { return frame.has_value(); }
};

template <typename Frame>
struct BuiltFrame {
    Frame frame;
    SymbolStream symbols;
};

/// Throws std::invalid_argument if the payload is not octet-aligned or is
/// longer than 1500 octets.
BuiltFrame<DataFrame> build_data_frame(const Address& dest, const Address& src, const BitString& payload_bits);
BuiltFrame<DataFrame> build_data_frame(const Address& dest, const Address& src,
                                       std::span<const std::uint8_t> payload_octets);

ParseResult<DataFrame> parse_data_frame(std::span<const std::int8_t> symbols);

/// Throws std::invalid_argument for FrameType::Data.
BuiltFrame<ControlFrame> build_control_frame(FrameType type, const Address& dest, const Address& src,
                                             std::uint16_t length);

ParseResult<ControlFrame> parse_control_frame(std::span<const std::int8_t> symbols);

using AnyFrame = std::variant<DataFrame, ControlFrame>;

/// Dispatches on the type field.
ParseResult<AnyFrame> parse_frame(std::span<const std::int8_t> symbols);

/// Binary image of a frame: header octets, payload octets before encoding,
/// then the checksum. This is what hex-dump fixtures hold.
std::vector<std::uint8_t> frame_octets(const DataFrame& frame);
std::vector<std::uint8_t> frame_octets(const ControlFrame& frame);

/// Inverse of frame_octets: turns a binary image back into on-air symbols,
/// RBN-encoding the payload of a data frame. Only the type field is read;
/// nothing is validated, so a damaged image yields a damaged stream.
/// Throws std::invalid_argument if the image is too short to hold a header.
SymbolStream symbols_from_image(std::span<const std::uint8_t> image);

std::size_t data_frame_symbols(std::size_t payload_octets) noexcept;

/// Longest possible frame on air, in microseconds: a full 1500-octet payload.
double max_frame_duration_us(const DeviceProfile& profile);
std::size_t max_frame_symbols() noexcept;

/// One character per symbol: '+', '0', '-' ('x' for garbled).
std::string symbols_to_text(std::span<const std::int8_t> symbols);
SymbolStream symbols_from_text(std::string_view text);

/// Uppercase hex, 16 octets per line.
std::string hex_dump(std::span<const std::uint8_t> octets);
std::vector<std::uint8_t> parse_hex(std::string_view text);

}  // namespace rbnsize
