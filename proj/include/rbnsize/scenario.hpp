#pragma once

// Simulation scenario description and its JSON file format.
//
// Scenario files are JSON objects with "schema_version": 1. Times are in
// microseconds. See docs/scenario-format.md for the full field list.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rbnsize/energy_model.hpp"
#include "rbnsize/mac_frames.hpp"

namespace rbnsize {

inline constexpr int kScenarioSchemaVersion = 1;
inline constexpr int kBroadcastDest = -1;

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NodeSpec {
    int id = 0;
    Address address;
    std::optional<std::pair<double, double>> position;
    std::vector<int> neighbors;
    double wake_us = 0.0;  // before this the radio is off: no sensing, no reception
};

struct LinkDelay {
    int a = 0;
    int b = 0;
    double delay_us = 0.0;
};

struct TrafficSpec {
    double time_us = 0.0;
    int src = 0;
    int dest = 0;  // node id, or kBroadcastDest
    std::vector<std::uint8_t> payload;
};

/// Zero-valued durations mean "use the default", filled in by resolved_timing().
struct TimingConfig {
    double slot_time_us = 0.0;    // default: one symbol
    double sifs_us = 0.0;         // default: two symbols
    double nifs_us = 0.0;         // default: SIFS + 2 slots
    std::optional<double> b_override_us;  // default: max_frame_duration_us(profile)
    double cts_timeout_us = 0.0;  // default: SIFS + control frame + 2 slots + 2 * max link delay
    double ack_timeout_us = 0.0;  // same default as cts_timeout_us
    double sense_window_us = 0.0; // 0: instantaneous carrier sense
    int cw_min = 16;
    int cw_max = 1024;
    int retry_limit = 7;
    bool count_transients = false;
    bool virtual_carrier_sense = true;  // NAV from overheard RTS/CTS
};

struct SimScenario {
    std::vector<NodeSpec> nodes;
    std::optional<double> range;  // used when nodes carry positions
    std::vector<LinkDelay> link_delays;
    std::vector<TrafficSpec> traffic;
    TimingConfig timing;
    DeviceProfile profile;
    std::uint64_t rng_seed = 0;
    double duration_us = 0.0;

    /// Throws ScenarioError on malformed input: duplicate ids, unknown
    /// nodes, asymmetric adjacency, SIFS >= NIFS, oversize payloads, ...
    void validate() const;

    /// Fills defaulted timing fields. Returns a copy.
    TimingConfig resolved_timing() const;

    /// Index-based symmetric adjacency (nodes[i] hears nodes[j]).
    std::vector<std::vector<bool>> adjacency() const;
    int index_of(int id) const;
};

SimScenario parse_scenario_json(std::string_view text, const std::vector<DeviceProfile>& profiles);
SimScenario load_scenario(const std::string& path, const std::vector<DeviceProfile>& profiles);

}  // namespace rbnsize
