#include <doctest.h>

#include <algorithm>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "rbnsize/mac_sim.hpp"
#include "sim_scenarios.hpp"

using namespace rbnsize;

namespace {

using namespace rbnsize::testing;

std::optional<TraceRecord> first(const SimResult& r, int node, const std::string& event,
                                 const std::string& detail_has = {}, SimTime after = -1) {
    for (const auto& t : r.trace) {
        if (t.node == node && t.event == event && t.time > after &&
            t.detail.find(detail_has) != std::string::npos) {
            return t;
        }
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("empty traffic: no events, no energy") {
    auto s = make(3);
    const auto r = run(s);
    CHECK(r.trace.empty());
    CHECK(r.transmissions.empty());
    for (const auto& [id, e] : r.metrics.node_energy) CHECK(e.total_uj == 0.0);
    CHECK(r.metrics.channel_busy_fraction == 0.0);
}

TEST_CASE("single exchange follows the hand-computed timeline") {
    auto s = make(2);
    add_traffic(s, 0, 0, 1, std::vector<std::uint8_t>(10, 0x5A));
    MacSimulator sim(s);
    const SimTime window = sim.idle_window();
    const SimTime sifs = 2 * kTau, nifs = sifs + 2 * kTau, b = 12185 * kTau, ctl = 168 * kTau;
    CHECK(sim.symbol_time() == kTau);
    CHECK(window == nifs + b);
    const auto r = sim.run();

    const SimTime rts = window;
    const SimTime cts = rts + ctl + sifs;
    const SimTime data = cts + ctl + sifs;
    const SimTime data_end = data + static_cast<SimTime>(data_frame_symbols(10)) * kTau;
    const SimTime ack = data_end + sifs;
    const SimTime done = ack + ctl;

    REQUIRE(r.transmissions.size() == 4);
    CHECK(r.transmissions[0].kind == FrameType::Rts);
    CHECK(r.transmissions[0].start == rts);
    CHECK(r.transmissions[1].kind == FrameType::Cts);
    CHECK(r.transmissions[1].start == cts);
    CHECK(r.transmissions[2].kind == FrameType::Data);
    CHECK(r.transmissions[2].start == data);
    CHECK(r.transmissions[2].end == data_end);
    CHECK(r.transmissions[3].kind == FrameType::Ack);
    CHECK(r.transmissions[3].start == ack);
    for (const auto& t : r.transmissions) CHECK(t.outcome == RxOutcome::Received);

    CHECK(first(r, 1, "deliver")->time == data_end);
    CHECK(first(r, 0, "success")->time == done);
    CHECK(r.metrics.delivered == 1);
    CHECK(r.metrics.latency.max_us == doctest::Approx(ns_to_us(data_end)));
}

TEST_CASE("same seed, same trace") {
    const auto a = run(busy_line(99));
    const auto b = run(busy_line(99));
    CHECK(format_trace(a.trace) == format_trace(b.trace));
    CHECK(a.metrics.to_json() == b.metrics.to_json());
    CHECK_FALSE(a.trace.empty());
}

TEST_CASE("hidden terminal: RTS/CTS plus the wait rule keep data clean") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        CAPTURE(seed);
        const auto s = hidden_terminal(seed);
        const auto r = run(s);
        CHECK(r.metrics.delivered == 2);
        CHECK(r.metrics.failed == 0);
        CHECK(r.metrics.crc_failures == 0);
        CHECK(r.metrics.rts_collisions >= 1);  // both open with an RTS at the same instant
        for (const auto& t : r.transmissions) {
            if (t.kind == FrameType::Data) CHECK(t.outcome == RxOutcome::Received);
        }
        CHECK(std::none_of(r.trace.begin(), r.trace.end(),
                           [](const TraceRecord& t) { return t.event == "silent_corruption"; }));
    }
}

TEST_CASE("wait-b pair: a short wait lets a waking node hit the silent payload") {
    const auto shortb = run(wait_b(1.0));
    const auto fullb = run(wait_b(std::nullopt));
    REQUIRE(first_data(shortb, 0) != nullptr);
    REQUIRE(first_data(fullb, 0) != nullptr);
    const auto& d_short = *first_data(shortb, 0);
    const auto& d_full = *first_data(fullb, 0);

    // Short wait: node 2 transmits inside node 0's payload and garbles it at 1.
    const auto n2_short = txs_of(shortb, 2);
    REQUIRE_FALSE(n2_short.empty());
    CHECK(n2_short.front()->start > d_short.start);
    CHECK(n2_short.front()->start < d_short.end);
    CHECK(d_short.outcome == RxOutcome::Garbled);
    CHECK(shortb.metrics.crc_failures >= 1);

    // Full wait: node 2 stays quiet until the exchange is over.
    CHECK(d_full.outcome == RxOutcome::Received);
    CHECK(fullb.metrics.crc_failures == 0);
    const auto n2_full = txs_of(fullb, 2);
    REQUIRE_FALSE(n2_full.empty());
    CHECK(n2_full.front()->start > d_full.end);
    CHECK(fullb.metrics.delivered == 2);
}

TEST_CASE("SIFS responses beat a NIFS contender") {
    for (bool vcs : {true, false}) {
        CAPTURE(vcs);
        const auto s = sifs_priority(vcs);
        const SimTime rts_end = MacSimulator(s).idle_window() + 168 * kTau;
        const auto r = run(s);

        const auto cts = txs_of(r, 1, FrameType::Cts);
        REQUIRE_FALSE(cts.empty());
        CHECK(cts.front()->start == rts_end + 2 * kTau);
        const auto ack = txs_of(r, 1, FrameType::Ack);
        REQUIRE_FALSE(ack.empty());
        const auto n2 = txs_of(r, 2);
        REQUIRE_FALSE(n2.empty());
        CHECK(n2.front()->start >= ack.front()->end);
        CHECK(r.metrics.delivered == 2);
        CHECK(r.metrics.crc_failures == 0);
    }
}

TEST_CASE("per-node energy equals pricing of what each node sent") {
    for (bool transients : {false, true}) {
        const auto s = mixed_traffic(transients);
        const auto r = run(s);
        for (const auto& [id, e] : r.metrics.node_energy) {
            EnergyBreakdown expect;
            for (const auto* t : txs_of(r, id)) expect += price_symbols(t->symbols, s.profile, transients);
            CHECK(e.total_uj == doctest::Approx(expect.total_uj).epsilon(1e-12));
            CHECK(e.energized_symbols == expect.energized_symbols);
            CHECK(e.symbols == expect.symbols);
        }
        CHECK(r.metrics.delivered == 3);
    }
}

TEST_CASE("carrier sense follows energized symbols only") {
    auto s = make(3, {{0, 1}});
    add_traffic(s, 0, 0, 1, std::vector<std::uint8_t>(20, 0xFF));
    MacSimulator sim(s);
    CHECK(sim.carrier_sense(1, 0) == ChannelSense::Idle);
    sim.run();
    const SimTime sifs = 2 * kTau, ctl = 168 * kTau;
    const SimTime rts = sim.idle_window();
    const SimTime data = rts + ctl + sifs + ctl + sifs;
    CHECK(sim.carrier_sense(1, rts + kTau / 2) == ChannelSense::Busy);        // preamble
    CHECK(sim.carrier_sense(1, data + 152 * kTau + kTau / 2) == ChannelSense::Busy);  // carry digit
    CHECK(sim.carrier_sense(1, data + 160 * kTau) == ChannelSense::Idle);     // silent run of the payload
    CHECK(sim.carrier_sense(0, data + 100 * kTau) == ChannelSense::Idle);     // its own frame
    CHECK(sim.carrier_sense(2, rts + kTau) == ChannelSense::Idle);            // out of range
}

TEST_CASE("broadcast needs no handshake") {
    auto s = make(3);
    add_traffic(s, 0, 0, kBroadcastDest, std::vector<std::uint8_t>{1, 2, 3});
    const auto r = run(s);
    REQUIRE(r.transmissions.size() == 1);
    CHECK(r.transmissions[0].kind == FrameType::Data);
    CHECK(r.metrics.rts_sent == 0);
    CHECK(first(r, 1, "deliver").has_value());
    CHECK(first(r, 2, "deliver").has_value());
}

TEST_CASE("two nodes exchanging a backlog make progress") {
    auto s = make(2);
    for (int k = 0; k < 10; ++k) {
        add_traffic(s, 50.0 * k, k % 2, 1 - k % 2, std::vector<std::uint8_t>(16, static_cast<std::uint8_t>(k)));
    }
    s.timing.slot_time_us = 200 * 20;
    const auto r = run(s);
    CHECK(r.metrics.delivered == 10);
    CHECK(r.metrics.failed == 0);
    CHECK(r.metrics.latency.count == 10);
    CHECK(r.metrics.channel_busy_fraction > 0.0);
    CHECK(r.metrics.channel_busy_fraction < 1.0);
    const auto j = nlohmann::json::parse(r.metrics.to_json());
    CHECK(j["delivered"] == 10);
}

TEST_CASE("retry limit drops unreachable traffic") {
    auto s = make(2);
    s.nodes[1].wake_us = 1e9;  // never wakes within the run
    add_traffic(s, 0, 0, 1, std::vector<std::uint8_t>{9});
    s.timing.retry_limit = 2;
    s.timing.slot_time_us = 20;
    const auto r = run(s);
    CHECK(r.metrics.failed == 1);
    CHECK(r.metrics.delivered == 0);
    CHECK(r.metrics.rts_sent == 3);
    CHECK(r.metrics.retries == 2);
    CHECK(first(r, 0, "drop").has_value());
}

TEST_CASE("scenario validation") {
    const auto& profiles = builtin_profiles();
    const std::string ok = R"({"schema_version":1,"duration_us":1000,
        "nodes":[{"id":0,"neighbors":[1]},{"id":1,"neighbors":[0]}],
        "traffic":[{"time_us":0,"src":0,"dest":1,"payload_hex":"AB"}]})";
    CHECK_NOTHROW(parse_scenario_json(ok, profiles));
    const auto sc = parse_scenario_json(ok, profiles);
    CHECK(sc.profile.name == "Maxim 2820");
    CHECK(sc.nodes[1].address == Address::from_index(2));

    auto bad = [&](const std::string& text) { CHECK_THROWS_AS(parse_scenario_json(text, profiles), ScenarioError); };
    bad(R"({"schema_version":2,"duration_us":1,"nodes":[{"id":0}]})");
    bad(R"({"schema_version":1,"nodes":[{"id":0}]})");
    bad(R"({"schema_version":1,"duration_us":1,"nodes":[]})");
    bad(R"({"schema_version":1,"duration_us":1,"nodes":[{"id":0},{"id":0}]})");
    bad(R"({"schema_version":1,"duration_us":1,"nodes":[{"id":0,"neighbors":[1]},{"id":1}]})");
    bad(R"({"schema_version":1,"duration_us":1,"nodes":[{"id":0,"neighbors":[5]}]})");
    bad(R"({"schema_version":1,"duration_us":1,"nodes":[{"id":0},{"id":1}],
            "traffic":[{"time_us":0,"src":0,"dest":0}]})");
    bad(R"({"schema_version":1,"duration_us":1,"nodes":[{"id":0},{"id":1}],
            "traffic":[{"time_us":0,"src":0,"dest":1,"payload_octets":1501}]})");
    bad(R"({"schema_version":1,"duration_us":1,"nodes":[{"id":0}],"timing":{"sifs_us":100,"nifs_us":50}})");
    bad(R"({"schema_version":1,"duration_us":1,"nodes":[{"id":0}],"profile":"nRF24"})");
    bad(R"({"schema_version":1,"duration_us":1,"nodes":[{"id":0,"address":"FF:FF:FF:FF:FF:FF"}]})");
    bad("not json");
}
