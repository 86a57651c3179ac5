#include "rbnsize/mac_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <queue>
#include <random>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

namespace rbnsize {

SimTime us_to_ns(double us) { return static_cast<SimTime>(std::llround(us * 1000.0)); }
double ns_to_us(SimTime ns) { return static_cast<double>(ns) / 1000.0; }

std::string_view to_string(Phase phase) noexcept {
    switch (phase) {
        case Phase::Idle: return "Idle";
        case Phase::SensingWaitB: return "SensingWaitB";
        case Phase::AwaitCts: return "AwaitCts";
        case Phase::Transmitting: return "Transmitting";
        case Phase::AwaitAck: return "AwaitAck";
        case Phase::Backoff: return "Backoff";
        case Phase::Receiving: return "Receiving";
    }
    return "?";
}

std::string_view to_string(RxOutcome outcome) noexcept {
    switch (outcome) {
        case RxOutcome::Pending: return "Pending";
        case RxOutcome::Received: return "Received";
        case RxOutcome::Garbled: return "Garbled";
        case RxOutcome::Missed: return "Missed";
        case RxOutcome::Broadcast: return "Broadcast";
    }
    return "?";
}

std::string format_trace(const std::vector<TraceRecord>& trace) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    for (const auto& r : trace) {
        os << ns_to_us(r.time) << ' ' << r.node << ' ' << r.event;
        if (!r.detail.empty()) os << ' ' << r.detail;
        os << '\n';
    }
    return os.str();
}

std::string SimMetrics::to_json() const {
    nlohmann::json j;
    j["offered"] = offered;
    j["delivered"] = delivered;
    j["duplicate_deliveries"] = duplicate_deliveries;
    j["failed"] = failed;
    j["crc_failures"] = crc_failures;
    j["rts_sent"] = rts_sent;
    j["rts_collisions"] = rts_collisions;
    j["retries"] = retries;
    j["channel_busy_fraction"] = channel_busy_fraction;
    j["end_time_us"] = ns_to_us(end_time);
    auto& errs = j["rx_errors"] = nlohmann::json::object();
    for (const auto& [e, n] : rx_errors) errs[std::string(to_string(e))] = n;
    auto& energy = j["node_energy_uj"] = nlohmann::json::object();
    for (const auto& [id, e] : node_energy) {
        energy[std::to_string(id)] = {{"tx", e.tx_energy_uj},
                                      {"idle", e.idle_energy_uj},
                                      {"transient", e.transient_energy_uj},
                                      {"total", e.total_uj},
                                      {"symbols", e.symbols},
                                      {"energized_symbols", e.energized_symbols}};
    }
    j["latency_us"] = {{"count", latency.count}, {"min", latency.min_us}, {"max", latency.max_us},
                       {"mean", latency.mean_us}, {"p50", latency.p50_us}, {"p95", latency.p95_us}};
    return j.dump(2);
}

namespace {

// Lower value runs first among events sharing a time and node.
enum class EvKind : int {
    TxEnd,
    RxEnd,
    CtsTimeout,
    AckTimeout,
    ResponderTimeout,
    RxStart,
    Wake,
    Traffic,
    BackoffDone,
    SendResponse,
    SendData,
    WindowExpire,
};

struct Event {
    SimTime time = 0;
    int node = 0;  // index
    EvKind kind = EvKind::Traffic;
    std::uint64_t seq = 0;
    int arg = 0;
    std::uint64_t gen = 0;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        return std::tie(a.time, a.node, a.kind, a.seq) > std::tie(b.time, b.node, b.kind, b.seq);
    }
};

struct Interval {
    SimTime begin = 0;
    SimTime end = 0;
};

// Initiator side of a node's MAC.
enum class Init { Idle, Sensing, Backoff, SendingRts, AwaitCts, SendingData, AwaitAck };

enum class Responder { None, PendingCts, AwaitData, PendingAck, Sending };

struct NodeRt {
    int id = 0;
    Address address;
    SimTime wake = 0;
    bool awake = false;

    Init init = Init::Idle;
    std::deque<int> queue;  // traffic indices
    int backoff_stage = 0;
    int cw = 0;
    int retries = 0;
    int peer = -1;  // initiator's exchange partner (index)

    bool sensing = false;
    SimTime sense_start = 0;
    std::uint64_t sense_gen = 0;
    std::uint64_t timeout_gen = 0;
    std::uint64_t resp_gen = 0;

    Responder responder = Responder::None;
    int resp_peer = -1;
    bool resp_expired = false;
    FrameType resp_kind = FrameType::Cts;

    int rx_tx = -1;
    bool rx_broken = false;
    int active_tx = -1;

    std::vector<Interval> nav;
    SimTime nav_until = 0;

    EnergyBreakdown energy;
};

SimTime floor_div(SimTime a, SimTime b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
SimTime ceil_div(SimTime a, SimTime b) { return -floor_div(-a, b); }

}  // namespace

struct MacSimulator::Impl {
    SimScenario sc;
    TimingConfig tm;
    std::vector<std::vector<bool>> adj;
    std::vector<std::vector<SimTime>> delay;
    std::vector<NodeRt> nodes;

    SimTime tau = 0;
    SimTime slot = 0, sifs = 0, nifs = 0, b = 0, window = 0;
    SimTime cts_timeout = 0, ack_timeout = 0, resp_timeout = 0, sense_window = 0;
    SimTime control_dur = 0, max_delay = 0, horizon = 0, stop = 0;

    std::priority_queue<Event, std::vector<Event>, EventAfter> events;
    std::uint64_t seq = 0;
    SimTime now = 0;
    std::mt19937_64 rng;

    std::vector<TxRecord> txs;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> energized;  // symbol runs per tx
    std::vector<int> recent;  // tx ids that may still matter

    std::vector<TraceRecord> trace;
    SimMetrics metrics;
    std::vector<int> delivered_count;  // per traffic item
    bool ran = false;

    explicit Impl(SimScenario s) : sc(std::move(s)) {
        sc.validate();
        tm = sc.resolved_timing();
        adj = sc.adjacency();
        const std::size_t n = sc.nodes.size();
        delay.assign(n, std::vector<SimTime>(n, 0));
        for (const auto& l : sc.link_delays) {
            const auto a = static_cast<std::size_t>(sc.index_of(l.a));
            const auto c = static_cast<std::size_t>(sc.index_of(l.b));
            delay[a][c] = delay[c][a] = us_to_ns(l.delay_us);
            max_delay = std::max(max_delay, delay[a][c]);
        }
        tau = us_to_ns(sc.profile.symbol_duration_us);
        slot = us_to_ns(tm.slot_time_us);
        sifs = us_to_ns(tm.sifs_us);
        nifs = us_to_ns(tm.nifs_us);
        b = tm.b_override_us ? us_to_ns(*tm.b_override_us)
                             : static_cast<SimTime>(max_frame_symbols()) * tau;
        window = nifs + b;
        cts_timeout = us_to_ns(tm.cts_timeout_us);
        ack_timeout = us_to_ns(tm.ack_timeout_us);
        resp_timeout = sifs + 2 * slot + 2 * max_delay;
        sense_window = us_to_ns(tm.sense_window_us);
        control_dur = static_cast<SimTime>(kControlSymbols) * tau;
        horizon = window + static_cast<SimTime>(max_frame_symbols()) * tau + max_delay + sense_window;
        stop = us_to_ns(sc.duration_us);
        rng.seed(sc.rng_seed);

        nodes.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            nodes[i].id = sc.nodes[i].id;
            nodes[i].address = sc.nodes[i].address;
            nodes[i].wake = us_to_ns(sc.nodes[i].wake_us);
            nodes[i].cw = tm.cw_min;
        }
        delivered_count.assign(sc.traffic.size(), 0);
    }

    // -- bookkeeping ------------------------------------------------------

    void schedule(SimTime t, int node, EvKind kind, int arg = 0, std::uint64_t gen = 0) {
        events.push(Event{t, node, kind, seq++, arg, gen});
    }

    void log(int node, std::string event, std::string detail = {}) {
        trace.push_back(TraceRecord{now, nodes[static_cast<std::size_t>(node)].id, std::move(event), std::move(detail)});
    }

    NodeRt& at(int i) { return nodes[static_cast<std::size_t>(i)]; }
    bool hears(int listener, int talker) const {
        return adj[static_cast<std::size_t>(listener)][static_cast<std::size_t>(talker)];
    }
    SimTime link_delay(int a, int c) const { return delay[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)]; }

    int index_of_address(const Address& a) const {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].address == a) return static_cast<int>(i);
        }
        return -1;
    }

    std::string id_of(int idx) const {
        return idx < 0 ? std::string("broadcast") : std::to_string(nodes[static_cast<std::size_t>(idx)].id);
    }

    static std::string us(SimTime t) {
        std::ostringstream os;
        os << std::fixed << std::setprecision(3) << ns_to_us(t);
        return os.str();
    }

    // -- channel ----------------------------------------------------------

    // Busy intervals as seen at `node`, ending after `from`.
    std::vector<Interval> busy_intervals(int node, SimTime from) const {
        std::vector<Interval> out;
        for (int id : recent) {
            const auto& t = txs[static_cast<std::size_t>(id)];
            if (t.node == node || !hears(node, t.node)) continue;
            const SimTime arrive = t.start + link_delay(t.node, node);
            if (arrive + static_cast<SimTime>(t.symbols.size()) * tau + sense_window <= from) continue;
            for (const auto& [k0, k1] : energized[static_cast<std::size_t>(id)]) {
                Interval iv{arrive + static_cast<SimTime>(k0) * tau,
                            arrive + static_cast<SimTime>(k1) * tau + sense_window};
                if (iv.end > from) out.push_back(iv);
            }
        }
        for (const auto& iv : nodes[static_cast<std::size_t>(node)].nav) {
            if (iv.end > from) out.push_back(iv);
        }
        std::sort(out.begin(), out.end(), [](const Interval& x, const Interval& y) {
            return std::tie(x.begin, x.end) < std::tie(y.begin, y.end);
        });
        return out;
    }

    void reschedule_sense(int i) {
        auto& n = at(i);
        if (n.init != Init::Sensing || !n.sensing) return;
        SimTime start = n.sense_start;
        for (const auto& iv : busy_intervals(i, start)) {
            if (iv.begin >= start + window) break;
            start = std::max(start, iv.end);
        }
        // Later busy intervals can only push the window further out.
        n.sense_start = start;
        ++n.sense_gen;
        schedule(start + window, i, EvKind::WindowExpire, 0, n.sense_gen);
    }

    void begin_sensing(int i) {
        auto& n = at(i);
        n.sensing = true;
        n.sense_start = now;
        log(i, "sense", "window_us=" + us(window));
        reschedule_sense(i);
    }

    void pause_sensing(int i) {
        auto& n = at(i);
        if (n.sensing) {
            n.sensing = false;
            ++n.sense_gen;
        }
    }

    void set_nav(int i, SimTime until) {
        auto& n = at(i);
        if (!tm.virtual_carrier_sense || until <= n.nav_until) return;
        n.nav.push_back({now, until});
        n.nav_until = until;
        log(i, "nav", "until_us=" + us(until));
        reschedule_sense(i);
    }

    void prune_recent() {
        SimTime keep_after = now - horizon;
        for (const auto& n : nodes) {
            if (n.sensing) keep_after = std::min(keep_after, n.sense_start - max_delay - sense_window);
        }
        std::erase_if(recent, [&](int id) { return txs[static_cast<std::size_t>(id)].end + max_delay + sense_window < keep_after; });
    }

    SymbolStream received_symbols(int node, const TxRecord& t) const {
        const SimTime a = t.start + link_delay(t.node, node);
        const auto len = static_cast<SimTime>(t.symbols.size());
        SymbolStream out = t.symbols;
        std::vector<std::int8_t> interference(t.symbols.size(), 0);
        std::vector<std::uint8_t> sources(t.symbols.size(), 0);
        for (int id : recent) {
            const auto& u = txs[static_cast<std::size_t>(id)];
            if (u.id == t.id || u.node == node || !hears(node, u.node)) continue;
            const SimTime ua = u.start + link_delay(u.node, node);
            const SimTime ue = ua + static_cast<SimTime>(u.symbols.size()) * tau;
            if (ue <= a || ua >= a + len * tau) continue;
            const SimTime j0 = std::max<SimTime>(0, floor_div(ua - a, tau));
            const SimTime j1 = std::min<SimTime>(len, ceil_div(ue - a, tau));
            for (SimTime j = j0; j < j1; ++j) {
                const SimTime k0 = std::max<SimTime>(0, floor_div(a + j * tau - ua, tau));
                const SimTime k1 =
                    std::min<SimTime>(static_cast<SimTime>(u.symbols.size()), ceil_div(a + (j + 1) * tau - ua, tau));
                std::int8_t v = 0;
                for (SimTime k = k0; k < k1; ++k) {
                    const std::int8_t s = u.symbols[static_cast<std::size_t>(k)];
                    if (s == 0) continue;
                    v = (v == 0 || v == s) ? s : kGarbledSymbol;
                }
                if (v == 0) continue;
                const auto jj = static_cast<std::size_t>(j);
                interference[jj] = v;
                ++sources[jj];
            }
        }
        for (std::size_t j = 0; j < out.size(); ++j) {
            if (sources[j] == 0) continue;
            // Silence picks up a lone interferer's symbol; any energy on top of
            // energy, or two interferers, is unreadable.
            out[j] = (sources[j] == 1 && out[j] == 0 && interference[j] != kGarbledSymbol) ? interference[j]
                                                                                          : kGarbledSymbol;
        }
        return out;
    }

    // -- transmissions ----------------------------------------------------

    int start_tx(int i, FrameType kind, int dest, int traffic, SymbolStream symbols) {
        auto& n = at(i);
        if (n.active_tx >= 0) {
            log(i, "tx_skip", "kind=" + std::string(to_string(kind)) + " reason=already-transmitting");
            return -1;
        }
        const int id = static_cast<int>(txs.size());
        TxRecord t;
        t.id = id;
        t.node = i;
        t.kind = kind;
        t.dest = dest;
        t.traffic = traffic;
        t.start = now;
        t.end = now + static_cast<SimTime>(symbols.size()) * tau;
        t.symbols = std::move(symbols);

        std::vector<std::pair<std::size_t, std::size_t>> runs;
        for (std::size_t k = 0; k < t.symbols.size();) {
            if (t.symbols[k] == 0) {
                ++k;
                continue;
            }
            std::size_t e = k;
            while (e < t.symbols.size() && t.symbols[e] != 0) ++e;
            runs.emplace_back(k, e);
            k = e;
        }

        n.energy += price_symbols(t.symbols, sc.profile, tm.count_transients);
        n.active_tx = id;
        if (n.rx_tx >= 0) n.rx_broken = true;
        if (kind == FrameType::Rts) ++metrics.rts_sent;

        log(i, "tx_start",
            "kind=" + std::string(to_string(kind)) + " dest=" + id_of(dest) + " tx=" + std::to_string(id) +
                " symbols=" + std::to_string(t.symbols.size()));

        schedule(t.end, i, EvKind::TxEnd, id);
        for (int j = 0; j < static_cast<int>(nodes.size()); ++j) {
            if (j == i || !hears(j, i)) continue;
            schedule(t.start + link_delay(i, j), j, EvKind::RxStart, id);
            schedule(t.end + link_delay(i, j), j, EvKind::RxEnd, id);
        }
        txs.push_back(std::move(t));
        energized.push_back(std::move(runs));
        prune_recent();
        recent.push_back(id);
        return id;
    }

    void send_initiation(int i) {
        auto& n = at(i);
        const int tid = n.queue.front();
        const auto& tr = sc.traffic[static_cast<std::size_t>(tid)];
        const Address& me = n.address;
        if (tr.dest == kBroadcastDest) {
            n.peer = -1;
            auto f = build_data_frame(Address::broadcast(), me, tr.payload);
            if (start_tx(i, FrameType::Data, -1, tid, std::move(f.symbols)) >= 0) n.init = Init::SendingData;
            return;
        }
        n.peer = sc.index_of(tr.dest);
        auto f = build_control_frame(FrameType::Rts, at(n.peer).address, me,
                                     static_cast<std::uint16_t>(tr.payload.size()));
        if (start_tx(i, FrameType::Rts, n.peer, -1, std::move(f.symbols)) >= 0) n.init = Init::SendingRts;
    }

    // -- initiator --------------------------------------------------------

    void start_attempt(int i) {
        auto& n = at(i);
        if (n.queue.empty()) {
            n.init = Init::Idle;
            n.sensing = false;
            return;
        }
        n.init = Init::Sensing;
        n.sensing = false;
        if (n.awake && n.responder == Responder::None) begin_sensing(i);
    }

    void on_success(int i) {
        auto& n = at(i);
        log(i, "success", "traffic=" + std::to_string(n.queue.front()) + " retries=" + std::to_string(n.retries));
        n.queue.pop_front();
        n.retries = 0;
        n.backoff_stage = 0;
        n.cw = tm.cw_min;
        n.peer = -1;
        start_attempt(i);
    }

    void on_failure(int i) {
        auto& n = at(i);
        ++n.retries;
        if (n.retries > tm.retry_limit) {
            ++metrics.failed;
            log(i, "drop", "traffic=" + std::to_string(n.queue.front()));
            n.queue.pop_front();
            n.retries = 0;
            n.backoff_stage = 0;
            n.cw = tm.cw_min;
            n.peer = -1;
            start_attempt(i);
            return;
        }
        ++metrics.retries;
        ++n.backoff_stage;
        const int shift = std::min(n.backoff_stage - 1, 30);
        n.cw = static_cast<int>(std::min<std::int64_t>(static_cast<std::int64_t>(tm.cw_min) << shift, tm.cw_max));
        const auto slots = static_cast<SimTime>(rng() % static_cast<std::uint64_t>(n.cw));
        n.init = Init::Backoff;
        n.sensing = false;
        log(i, "backoff", "slots=" + std::to_string(slots) + " cw=" + std::to_string(n.cw));
        schedule(now + slots * slot, i, EvKind::BackoffDone);
    }

    // -- responder --------------------------------------------------------

    bool can_respond(int i) {
        const auto& n = at(i);
        const bool init_free = n.init == Init::Idle || n.init == Init::Sensing || n.init == Init::Backoff;
        return n.active_tx < 0 && n.responder == Responder::None && init_free && n.nav_until <= now;
    }

    void finish_responder(int i) {
        auto& n = at(i);
        n.responder = Responder::None;
        n.resp_peer = -1;
        n.resp_expired = false;
        ++n.resp_gen;
        if (n.init == Init::Sensing && !n.sensing && n.awake) begin_sensing(i);
    }

    void respond(int i, int peer, FrameType kind) {
        auto& n = at(i);
        pause_sensing(i);
        n.responder = kind == FrameType::Cts ? Responder::PendingCts : Responder::PendingAck;
        n.resp_peer = peer;
        n.resp_kind = kind;
        ++n.resp_gen;
        schedule(now + sifs, i, EvKind::SendResponse, 0, n.resp_gen);
    }

    std::uint16_t reverse_length(int i, int peer) const {
        for (int tid : nodes[static_cast<std::size_t>(i)].queue) {
            const auto& tr = sc.traffic[static_cast<std::size_t>(tid)];
            if (tr.dest != kBroadcastDest && sc.index_of(tr.dest) == peer) {
                return static_cast<std::uint16_t>(tr.payload.size());
            }
        }
        return 0;
    }

    // -- reception --------------------------------------------------------

    void record_outcome(TxRecord& t, int receiver, RxOutcome outcome, FrameError err) {
        if (t.dest != receiver) return;
        t.outcome = outcome;
        t.error = err;
    }

    void deliver(int j, const TxRecord& t, const DataFrame& f) {
        const auto& tr = sc.traffic[static_cast<std::size_t>(t.traffic)];
        if (f.payload_bits != BitString::from_octets(tr.payload)) {
            // A frame that passed its checksum but carries the wrong payload.
            log(j, "silent_corruption", "tx=" + std::to_string(t.id));
            return;
        }
        auto& count = delivered_count[static_cast<std::size_t>(t.traffic)];
        const double latency = ns_to_us(now - us_to_ns(tr.time_us));
        if (count++ == 0) {
            ++metrics.delivered;
            metrics.latencies_us.push_back(latency);
        } else {
            ++metrics.duplicate_deliveries;
        }
        log(j, "deliver",
            "traffic=" + std::to_string(t.traffic) + " from=" + id_of(t.node) + " latency_us=" + us(now - us_to_ns(tr.time_us)));
    }

    void handle_control(int j, TxRecord& t, const ControlFrame& c) {
        auto& n = at(j);
        const bool mine = c.dest == n.address;
        const int src = index_of_address(c.src);
        switch (c.type) {
            case FrameType::Rts:
                if (!mine) {
                    set_nav(j, now + sifs + control_dur + sifs +
                                   static_cast<SimTime>(data_frame_symbols(c.length)) * tau + sifs + control_dur);
                } else if (src >= 0 && can_respond(j)) {
                    respond(j, src, FrameType::Cts);
                } else {
                    log(j, "rts_ignored", "from=" + id_of(src));
                }
                break;
            case FrameType::Cts:
                if (!mine) {
                    set_nav(j, now + sifs + b + sifs + control_dur);
                } else if (n.init == Init::AwaitCts && src == n.peer) {
                    ++n.timeout_gen;
                    n.init = Init::SendingData;
                    schedule(now + sifs, j, EvKind::SendData, 0, n.timeout_gen);
                }
                break;
            case FrameType::Ack:
                if (mine && n.init == Init::AwaitAck && src == n.peer) {
                    ++n.timeout_gen;
                    on_success(j);
                }
                break;
            case FrameType::Data:
                break;
        }
        (void)t;
    }

    void handle_data(int j, TxRecord& t, const DataFrame& f) {
        auto& n = at(j);
        if (!f.dest.accepted_by(n.address)) return;
        deliver(j, t, f);
        if (f.dest.is_broadcast()) return;
        const int src = index_of_address(f.src);
        const bool awaiting = n.responder == Responder::AwaitData || n.responder == Responder::None;
        if (src >= 0 && n.active_tx < 0 && awaiting) {
            respond(j, src, FrameType::Ack);
        }
    }

    void on_rx_end(int j, int id) {
        auto& n = at(j);
        auto& t = txs[static_cast<std::size_t>(id)];
        if (n.rx_tx != id) {
            if (t.dest == j) {
                const char* why = !n.awake ? "asleep" : "busy";
                log(j, "rx_miss", "tx=" + std::to_string(id) + " reason=" + why);
                record_outcome(t, j, RxOutcome::Missed, FrameError::None);
            }
            return;
        }
        n.rx_tx = -1;
        if (n.rx_broken) {
            n.rx_broken = false;
            log(j, "rx_miss", "tx=" + std::to_string(id) + " reason=half-duplex");
            record_outcome(t, j, RxOutcome::Missed, FrameError::None);
        } else {
            const SymbolStream got = received_symbols(j, t);
            auto parsed = parse_frame(got);
            if (!parsed.ok()) {
                ++metrics.rx_errors[parsed.error];
                log(j, "rx_fail", "tx=" + std::to_string(id) + " error=" + std::string(to_string(parsed.error)));
                record_outcome(t, j, RxOutcome::Garbled, parsed.error);
            } else {
                log(j, "rx_ok", "tx=" + std::to_string(id) + " kind=" + std::string(to_string(t.kind)) + " from=" + id_of(t.node));
                record_outcome(t, j, RxOutcome::Received, FrameError::None);
                if (t.dest == kBroadcastDest && t.outcome == RxOutcome::Pending) t.outcome = RxOutcome::Broadcast;
                if (const auto* c = std::get_if<ControlFrame>(&*parsed.frame)) {
                    handle_control(j, t, *c);
                } else {
                    handle_data(j, t, std::get<DataFrame>(*parsed.frame));
                }
            }
        }
        if (n.responder == Responder::AwaitData && n.resp_expired) finish_responder(j);
    }

    // -- event dispatch ---------------------------------------------------

    void dispatch(const Event& ev) {
        const int i = ev.node;
        auto& n = at(i);
        switch (ev.kind) {
            case EvKind::Wake:
                n.awake = true;
                if (n.wake > 0) log(i, "wake");
                if (n.init == Init::Sensing && !n.sensing && n.responder == Responder::None) begin_sensing(i);
                break;
            case EvKind::Traffic: {
                const auto& tr = sc.traffic[static_cast<std::size_t>(ev.arg)];
                n.queue.push_back(ev.arg);
                log(i, "traffic",
                    "traffic=" + std::to_string(ev.arg) + " dest=" +
                        (tr.dest == kBroadcastDest ? std::string("broadcast") : std::to_string(tr.dest)) +
                        " octets=" + std::to_string(tr.payload.size()));
                if (n.init == Init::Idle) start_attempt(i);
                break;
            }
            case EvKind::WindowExpire:
                if (ev.gen != n.sense_gen || n.init != Init::Sensing || !n.sensing) break;
                n.sensing = false;
                log(i, "idle_window");
                send_initiation(i);
                if (n.init == Init::Sensing) begin_sensing(i);  // send was refused
                break;
            case EvKind::BackoffDone:
                if (n.init != Init::Backoff) break;
                n.init = Init::Sensing;
                n.sensing = false;
                if (n.responder == Responder::None && n.awake) begin_sensing(i);
                break;
            case EvKind::SendData: {
                if (ev.gen != n.timeout_gen || n.init != Init::SendingData) break;
                const int tid = n.queue.front();
                const auto& tr = sc.traffic[static_cast<std::size_t>(tid)];
                auto f = build_data_frame(at(n.peer).address, n.address, tr.payload);
                if (start_tx(i, FrameType::Data, n.peer, tid, std::move(f.symbols)) < 0) on_failure(i);
                break;
            }
            case EvKind::SendResponse: {
                if (ev.gen != n.resp_gen) break;
                if (n.responder != Responder::PendingCts && n.responder != Responder::PendingAck) break;
                const int peer = n.resp_peer;
                const FrameType kind = n.resp_kind;
                const std::uint16_t len = reverse_length(i, peer);
                auto f = build_control_frame(kind, at(peer).address, n.address, len);
                if (start_tx(i, kind, peer, -1, std::move(f.symbols)) >= 0) {
                    n.responder = Responder::Sending;
                } else {
                    finish_responder(i);
                }
                break;
            }
            case EvKind::TxEnd: {
                const auto& t = txs[static_cast<std::size_t>(ev.arg)];
                n.active_tx = -1;
                log(i, "tx_end", "kind=" + std::string(to_string(t.kind)) + " tx=" + std::to_string(t.id));
                switch (t.kind) {
                    case FrameType::Rts:
                        n.init = Init::AwaitCts;
                        schedule(now + cts_timeout, i, EvKind::CtsTimeout, 0, ++n.timeout_gen);
                        break;
                    case FrameType::Data:
                        if (t.dest == kBroadcastDest) {
                            on_success(i);
                        } else {
                            n.init = Init::AwaitAck;
                            schedule(now + ack_timeout, i, EvKind::AckTimeout, 0, ++n.timeout_gen);
                        }
                        break;
                    case FrameType::Cts:
                        n.responder = Responder::AwaitData;
                        n.resp_expired = false;
                        schedule(now + resp_timeout, i, EvKind::ResponderTimeout, 0, ++n.resp_gen);
                        break;
                    case FrameType::Ack:
                        finish_responder(i);
                        break;
                }
                break;
            }
            case EvKind::CtsTimeout:
            case EvKind::AckTimeout:
                if (ev.gen != n.timeout_gen) break;
                if (ev.kind == EvKind::CtsTimeout && n.init != Init::AwaitCts) break;
                if (ev.kind == EvKind::AckTimeout && n.init != Init::AwaitAck) break;
                log(i, ev.kind == EvKind::CtsTimeout ? "cts_timeout" : "ack_timeout");
                on_failure(i);
                break;
            case EvKind::ResponderTimeout:
                if (ev.gen != n.resp_gen || n.responder != Responder::AwaitData) break;
                if (n.rx_tx >= 0) {
                    n.resp_expired = true;  // decide once the frame in flight ends
                } else {
                    log(i, "data_timeout");
                    finish_responder(i);
                }
                break;
            case EvKind::RxStart:
                if (!n.awake) break;
                if (n.active_tx < 0 && n.rx_tx < 0) {
                    n.rx_tx = ev.arg;
                    n.rx_broken = false;
                }
                reschedule_sense(i);
                break;
            case EvKind::RxEnd:
                on_rx_end(i, ev.arg);
                break;
        }
    }

    SimResult run() {
        if (ran) throw std::logic_error("MacSimulator::run called twice");
        ran = true;
        metrics.offered = sc.traffic.size();
        for (int i = 0; i < static_cast<int>(nodes.size()); ++i) schedule(at(i).wake, i, EvKind::Wake);
        for (int k = 0; k < static_cast<int>(sc.traffic.size()); ++k) {
            const auto& tr = sc.traffic[static_cast<std::size_t>(k)];
            schedule(us_to_ns(tr.time_us), sc.index_of(tr.src), EvKind::Traffic, k);
        }
        while (!events.empty() && events.top().time <= stop) {
            const Event ev = events.top();
            events.pop();
            now = ev.time;
            dispatch(ev);
        }
        finalize();
        std::vector<TxRecord> out = txs;
        for (auto& t : out) {
            t.node = at(t.node).id;
            if (t.dest >= 0) t.dest = at(t.dest).id;
        }
        return SimResult{metrics, trace, std::move(out)};
    }

    void finalize() {
        metrics.end_time = events.empty() ? now : stop;
        for (const auto& n : nodes) metrics.node_energy[n.id] = n.energy;
        for (const auto& t : txs) {
            if (t.kind == FrameType::Rts && (t.outcome == RxOutcome::Garbled || t.outcome == RxOutcome::Missed)) {
                ++metrics.rts_collisions;
            }
            if (t.kind == FrameType::Data && t.outcome == RxOutcome::Garbled) ++metrics.crc_failures;
        }
        // Union of energized intervals at the transmitters.
        std::vector<Interval> busy;
        for (std::size_t id = 0; id < txs.size(); ++id) {
            for (const auto& [k0, k1] : energized[id]) {
                busy.push_back({txs[id].start + static_cast<SimTime>(k0) * tau, txs[id].start + static_cast<SimTime>(k1) * tau});
            }
        }
        std::sort(busy.begin(), busy.end(), [](const Interval& x, const Interval& y) { return x.begin < y.begin; });
        SimTime covered = 0, cur_b = 0, cur_e = -1;
        const SimTime horizon_end = metrics.end_time;
        for (const auto& iv : busy) {
            const SimTime bb = std::min(iv.begin, horizon_end), ee = std::min(iv.end, horizon_end);
            if (bb > cur_e) {
                if (cur_e > cur_b) covered += cur_e - cur_b;
                cur_b = bb;
                cur_e = ee;
            } else {
                cur_e = std::max(cur_e, ee);
            }
        }
        if (cur_e > cur_b) covered += cur_e - cur_b;
        metrics.channel_busy_fraction =
            horizon_end > 0 ? static_cast<double>(covered) / static_cast<double>(horizon_end) : 0.0;

        auto& l = metrics.latencies_us;
        metrics.latency.count = l.size();
        if (!l.empty()) {
            std::vector<double> s = l;
            std::sort(s.begin(), s.end());
            metrics.latency.min_us = s.front();
            metrics.latency.max_us = s.back();
            double sum = 0;
            for (double v : s) sum += v;
            metrics.latency.mean_us = sum / static_cast<double>(s.size());
            auto pct = [&](double p) {
                const auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(s.size()))) - 1;
                return s[std::min(k, s.size() - 1)];
            };
            metrics.latency.p50_us = pct(0.50);
            metrics.latency.p95_us = pct(0.95);
        }
    }

    ChannelSense carrier_sense(int node, SimTime t) const {
        for (const auto& u : txs) {
            if (u.node == node || !hears(node, u.node)) continue;
            const SimTime a = u.start + link_delay(u.node, node);
            if (t < a) continue;
            const SimTime k = (t - a) / tau;
            if (k >= static_cast<SimTime>(u.symbols.size())) continue;
            if (u.symbols[static_cast<std::size_t>(k)] != 0) return ChannelSense::Busy;
        }
        return ChannelSense::Idle;
    }
};

MacSimulator::MacSimulator(SimScenario scenario) : impl_(std::make_unique<Impl>(std::move(scenario))) {}
MacSimulator::~MacSimulator() = default;

SimResult MacSimulator::run() { return impl_->run(); }

ChannelSense MacSimulator::carrier_sense(int node_id, SimTime t) const {
    return impl_->carrier_sense(impl_->sc.index_of(node_id), t);
}

SimTime MacSimulator::idle_window() const noexcept { return impl_->window; }
SimTime MacSimulator::symbol_time() const noexcept { return impl_->tau; }

SimResult run(const SimScenario& scenario) {
    MacSimulator sim(scenario);
    return sim.run();
}

}  // namespace rbnsize
