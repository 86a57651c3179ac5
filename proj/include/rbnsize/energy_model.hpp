#pragma once

// Radio energy pricing for energy-based (EbT), silent-zero (SiZe) and
// redundant-binary (RBN) transmission.
//
// Units: microseconds, milliamps, volts; energies in microjoules.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rbnsize/errors.hpp"
#include "rbnsize/rbn_codec.hpp"

namespace rbnsize {

struct DeviceProfile {
    std::string name;
    double data_rate_kbps = 0.0;
    double symbol_duration_us = 0.0;
    double v_cc = 0.0;
    double i_high_ma = 0.0;  // TX state
    double i_low_ma = 0.0;   // active state
    double t_on_us = 0.0;    // turn-on transient

    /// Throws std::invalid_argument when the electrical invariants fail.
    void validate() const;
};

/// The four radios of the reference device table.
const std::vector<DeviceProfile>& builtin_profiles();

/// Case-insensitive lookup by name, also accepting the name with spaces and
/// dashes removed ("maxim2820"). Searches `profiles`.
const DeviceProfile& find_profile(const std::vector<DeviceProfile>& profiles, std::string_view name);

/// Profile config: {"schema_version": 1, "profiles": [{...}, ...]}.
std::vector<DeviceProfile> load_profiles(const std::string& path);
std::vector<DeviceProfile> parse_profiles_json(std::string_view text);
std::string profiles_to_json(const std::vector<DeviceProfile>& profiles);

enum class TxMode { EbT, SiZe, RBN };

std::string_view to_string(TxMode mode) noexcept;
TxMode tx_mode_from_string(std::string_view text);

struct EnergyBreakdown {
    TxMode mode = TxMode::EbT;
    double tx_energy_uj = 0.0;
    double idle_energy_uj = 0.0;
    double transient_energy_uj = 0.0;
    double total_uj = 0.0;
    std::uint64_t symbols = 0;
    std::uint64_t energized_symbols = 0;
    std::uint64_t turn_ons = 0;

    EnergyBreakdown& operator+=(const EnergyBreakdown& other);
};

/// Fractional savings of SiZe over EbT: (I_high - I_low) / (2 I_high).
double gamma_size(const DeviceProfile& profile);

/// Fractional savings of RBN over EbT for n-bit frames:
/// (1 - (n+2)/(4n)) (1 - I_low/I_high).
double gamma_dev(const DeviceProfile& profile, std::int64_t n);

/// (1 - f)(1 - I_low/I_high) for a stream whose energized-symbol fraction is f.
double savings_vs_ebt(double nonzero_fraction, const DeviceProfile& profile);

/// Prices a binary frame in EbT or SiZe mode. Throws std::invalid_argument
/// for TxMode::RBN.
EnergyBreakdown frame_energy(const BitString& bits, const DeviceProfile& profile, TxMode mode,
                             bool count_transients = false);

/// Prices an RBN stream. Throws std::invalid_argument unless mode is RBN.
EnergyBreakdown frame_energy(const RbnString& digits, const DeviceProfile& profile, TxMode mode,
                             bool count_transients = false);

/// Prices raw on-air symbols in {-1, 0, +1}: zeros are silent, anything
/// else is energized. The stream is taken to start after silence.
EnergyBreakdown price_symbols(std::span<const std::int8_t> symbols, const DeviceProfile& profile,
                              bool count_transients = false);

}  // namespace rbnsize
