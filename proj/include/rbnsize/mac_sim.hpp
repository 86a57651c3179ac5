#pragma once

// Discrete-event simulation of RBNSiZeMAC: CSMA/CA with RTS/CTS/ACK over a
// shared channel where zero payload symbols are silence.
//
// Time is kept in integer nanoseconds. Events are ordered by
// (time, node index, event kind, insertion order), so a run is a pure
// function of the scenario and its seed.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rbnsize/energy_model.hpp"
#include "rbnsize/mac_frames.hpp"
#include "rbnsize/scenario.hpp"

namespace rbnsize {

using SimTime = std::int64_t;  // nanoseconds

SimTime us_to_ns(double us);
double ns_to_us(SimTime ns);

enum class Phase { Idle, SensingWaitB, AwaitCts, Transmitting, AwaitAck, Backoff, Receiving };

std::string_view to_string(Phase phase) noexcept;

enum class ChannelSense { Idle, Busy };

struct TraceRecord {
    SimTime time = 0;
    int node = 0;  // node id
    std::string event;
    std::string detail;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Line format: "<time_us> <node> <event> <detail>".
std::string format_trace(const std::vector<TraceRecord>& trace);

/// Reception outcome of a transmission at its intended receiver.
enum class RxOutcome { Pending, Received, Garbled, Missed, Broadcast };

std::string_view to_string(RxOutcome outcome) noexcept;

struct TxRecord {
    int id = 0;
    int node = 0;       // transmitting node id
    FrameType kind = FrameType::Data;
    int dest = kBroadcastDest;  // intended receiver node id
    int traffic = -1;           // traffic index for DATA frames
    SimTime start = 0;
    SimTime end = 0;
    SymbolStream symbols;
    RxOutcome outcome = RxOutcome::Pending;
    FrameError error = FrameError::None;
};

struct LatencyStats {
    std::size_t count = 0;
    double min_us = 0, max_us = 0, mean_us = 0, p50_us = 0, p95_us = 0;
};

struct SimMetrics {
    std::size_t offered = 0;
    std::size_t delivered = 0;            // unique traffic items delivered
    std::size_t duplicate_deliveries = 0;
    std::size_t failed = 0;               // dropped after the retry limit
    std::size_t crc_failures = 0;         // DATA frames garbled at their receiver
    std::size_t rts_sent = 0;
    std::size_t rts_collisions = 0;       // RTS frames not received cleanly
    std::size_t retries = 0;
    std::map<FrameError, std::size_t> rx_errors;
    std::map<int, EnergyBreakdown> node_energy;  // by node id
    double channel_busy_fraction = 0.0;
    std::vector<double> latencies_us;
    LatencyStats latency;
    SimTime end_time = 0;

    std::string to_json() const;
};

struct SimResult {
    SimMetrics metrics;
    std::vector<TraceRecord> trace;
    std::vector<TxRecord> transmissions;
};

class MacSimulator {
public:
    explicit MacSimulator(SimScenario scenario);
    ~MacSimulator();
    MacSimulator(const MacSimulator&) = delete;
    MacSimulator& operator=(const MacSimulator&) = delete;

    /// Runs to the scenario duration or until no events remain. Single use.
    SimResult run();

    /// Instantaneous carrier sense at `node_id`: busy iff some in-range
    /// transmitter is emitting a non-zero symbol at time t (as it arrives
    /// at this node). Silent payload digits sense as idle. Uses every
    /// transmission known so far, so after run() it covers the whole run.
    ChannelSense carrier_sense(int node_id, SimTime t) const;

    /// Length of the idle window an initiator must observe: NIFS + b.
    SimTime idle_window() const noexcept;
    SimTime symbol_time() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Convenience wrapper: validate, build a simulator and run it.
SimResult run(const SimScenario& scenario);

}  // namespace rbnsize
