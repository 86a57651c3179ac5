#include "rbnsize/energy_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace rbnsize {

namespace {

constexpr int kProfileSchemaVersion = 1;

// V * mA * us = 1e-9 J = 1e-3 uJ
constexpr double kUjPerVmAus = 1e-3;

std::string squash(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

// Shared pricing loop. `energized(i)` reports whether symbol i draws I_high.
template <typename Energized>
EnergyBreakdown price(std::size_t count, Energized&& energized, const DeviceProfile& p, TxMode mode,
                      bool count_transients) {
    EnergyBreakdown e;
    e.mode = mode;
    e.symbols = count;
    bool prev_on = false;
    for (std::size_t i = 0; i < count; ++i) {
        const bool on = energized(i);
        e.energized_symbols += on;
        if (on && !prev_on) ++e.turn_ons;
        prev_on = on;
    }
    const double tau = p.symbol_duration_us;
    e.tx_energy_uj = static_cast<double>(e.energized_symbols) * p.v_cc * p.i_high_ma * tau * kUjPerVmAus;
    e.idle_energy_uj =
        static_cast<double>(count - e.energized_symbols) * p.v_cc * p.i_low_ma * tau * kUjPerVmAus;
    if (count_transients) {
        e.transient_energy_uj = static_cast<double>(e.turn_ons) * p.v_cc * p.i_high_ma * p.t_on_us * kUjPerVmAus;
    }
    e.total_uj = e.tx_energy_uj + e.idle_energy_uj + e.transient_energy_uj;
    return e;
}

}  // namespace

void DeviceProfile::validate() const {
    if (!(symbol_duration_us > 0.0)) throw std::invalid_argument(name + ": symbol duration must be positive");
    if (!(i_low_ma >= 0.0)) throw std::invalid_argument(name + ": I_low must be non-negative");
    if (!(i_high_ma > i_low_ma)) throw std::invalid_argument(name + ": I_high must exceed I_low");
    if (!(v_cc > 0.0)) throw std::invalid_argument(name + ": V_cc must be positive");
    if (t_on_us < 0.0) throw std::invalid_argument(name + ": t_on must be non-negative");
    if (data_rate_kbps > 0.0) {
        const double product = data_rate_kbps * symbol_duration_us / 1000.0;
        if (std::abs(product - 1.0) > 0.01) {
            throw std::invalid_argument(name + ": data rate and symbol duration disagree by more than 1%");
        }
    }
}

const std::vector<DeviceProfile>& builtin_profiles() {
    static const std::vector<DeviceProfile> profiles = {
        {"Maxim 2820", 50.0, 20.0, 2.7, 70.0, 25.0, 3.0},
        {"Chipcon CC2510Fx", 2.5, 400.0, 3.0, 23.0, 7.5, 195.0},
        {"RFM TR1000", 25.0, 40.0, 3.0, 12.0, 7.0e-4, 16.0},
        {"Maxim 1479", 2.0, 500.0, 2.7, 7.3, 0.2e-6, 200.0},
    };
    return profiles;
}

const DeviceProfile& find_profile(const std::vector<DeviceProfile>& profiles, std::string_view name) {
    const std::string key = squash(name);
    for (const auto& p : profiles) {
        const std::string full = squash(p.name);
        if (full == key) return p;
        // part number alone, e.g. "cc2510fx" or "tr1000"
        const auto space = p.name.find(' ');
        if (space != std::string::npos && squash(std::string_view(p.name).substr(space)) == key) return p;
    }
    throw std::invalid_argument("unknown device profile: " + std::string(name));
}

std::vector<DeviceProfile> parse_profiles_json(std::string_view text) {
    const auto doc = nlohmann::json::parse(text);
    const int version = doc.at("schema_version").get<int>();
    if (version != kProfileSchemaVersion) {
        throw std::invalid_argument("profile config: unsupported schema_version " + std::to_string(version));
    }
    std::vector<DeviceProfile> out;
    for (const auto& j : doc.at("profiles")) {
        DeviceProfile p;
        p.name = j.at("name").get<std::string>();
        p.data_rate_kbps = j.value("data_rate_kbps", 0.0);
        p.symbol_duration_us = j.at("symbol_duration_us").get<double>();
        p.v_cc = j.at("v_cc").get<double>();
        p.i_high_ma = j.at("i_high_ma").get<double>();
        p.i_low_ma = j.at("i_low_ma").get<double>();
        p.t_on_us = j.value("t_on_us", 0.0);
        p.validate();
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<DeviceProfile> load_profiles(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open profile config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_profiles_json(ss.str());
}

std::string profiles_to_json(const std::vector<DeviceProfile>& profiles) {
    nlohmann::json doc;
    doc["schema_version"] = kProfileSchemaVersion;
    doc["profiles"] = nlohmann::json::array();
    for (const auto& p : profiles) {
        doc["profiles"].push_back({{"name", p.name},
                                   {"data_rate_kbps", p.data_rate_kbps},
                                   {"symbol_duration_us", p.symbol_duration_us},
                                   {"v_cc", p.v_cc},
                                   {"i_high_ma", p.i_high_ma},
                                   {"i_low_ma", p.i_low_ma},
                                   {"t_on_us", p.t_on_us}});
    }
    return doc.dump(2);
}

std::string_view to_string(TxMode mode) noexcept {
    switch (mode) {
        case TxMode::EbT: return "EbT";
        case TxMode::SiZe: return "SiZe";
        case TxMode::RBN: return "RBN";
    }
    return "?";
}

TxMode tx_mode_from_string(std::string_view text) {
    const std::string key = squash(text);
    if (key == "ebt") return TxMode::EbT;
    if (key == "size") return TxMode::SiZe;
    if (key == "rbn") return TxMode::RBN;
    throw std::invalid_argument("unknown transmission mode: " + std::string(text));
}

EnergyBreakdown& EnergyBreakdown::operator+=(const EnergyBreakdown& other) {
    tx_energy_uj += other.tx_energy_uj;
    idle_energy_uj += other.idle_energy_uj;
    transient_energy_uj += other.transient_energy_uj;
    total_uj += other.total_uj;
    symbols += other.symbols;
    energized_symbols += other.energized_symbols;
    turn_ons += other.turn_ons;
    return *this;
}

double gamma_size(const DeviceProfile& profile) {
    return (profile.i_high_ma - profile.i_low_ma) / (2.0 * profile.i_high_ma);
}

double gamma_dev(const DeviceProfile& profile, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("gamma_dev: n must be >= 1");
    const double f = static_cast<double>(n + 2) / (4.0 * static_cast<double>(n));
    return savings_vs_ebt(f, profile);
}

double savings_vs_ebt(double nonzero_fraction, const DeviceProfile& profile) {
    if (nonzero_fraction < 0.0 || nonzero_fraction > 1.0) {
        throw std::invalid_argument("savings_vs_ebt: fraction outside [0, 1]");
    }
    return (1.0 - nonzero_fraction) * (1.0 - profile.i_low_ma / profile.i_high_ma);
}

EnergyBreakdown frame_energy(const BitString& bits, const DeviceProfile& profile, TxMode mode,
                             bool count_transients) {
    switch (mode) {
        case TxMode::EbT:
            return price(bits.size(), [](std::size_t) { return true; }, profile, mode, count_transients);
        case TxMode::SiZe:
            return price(bits.size(), [&](std::size_t i) { return bits[i] != 0; }, profile, mode,
                         count_transients);
        case TxMode::RBN:
            break;
    }
    throw std::invalid_argument("frame_energy: RBN mode needs an RBN string, got binary");
}

EnergyBreakdown frame_energy(const RbnString& digits, const DeviceProfile& profile, TxMode mode,
                             bool count_transients) {
    if (mode != TxMode::RBN) {
        throw std::invalid_argument("frame_energy: " + std::string(to_string(mode)) +
                                    " mode needs a binary string, got RBN");
    }
    return price(digits.size(), [&](std::size_t i) { return digits[i] != 0; }, profile, mode,
                 count_transients);
}

EnergyBreakdown price_symbols(std::span<const std::int8_t> symbols, const DeviceProfile& profile,
                              bool count_transients) {
    return price(symbols.size(), [&](std::size_t i) { return symbols[i] != 0; }, profile, TxMode::RBN,
                 count_transients);
}

}  // namespace rbnsize
