#include "rbnsize/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rbnsize {

using nlohmann::json;

namespace {

DeviceProfile profile_from_json(const json& j, const std::vector<DeviceProfile>& profiles) {
    if (j.is_string()) return find_profile(profiles, j.get<std::string>());
    DeviceProfile p;
    p.name = j.value("name", std::string("custom"));
    p.data_rate_kbps = j.value("data_rate_kbps", 0.0);
    p.symbol_duration_us = j.at("symbol_duration_us").get<double>();
    p.v_cc = j.at("v_cc").get<double>();
    p.i_high_ma = j.at("i_high_ma").get<double>();
    p.i_low_ma = j.at("i_low_ma").get<double>();
    p.t_on_us = j.value("t_on_us", 0.0);
    return p;
}

std::vector<std::uint8_t> payload_from_json(const json& t) {
    if (t.contains("payload_hex")) return parse_hex(t.at("payload_hex").get<std::string>());
    const auto n = t.value("payload_octets", 0);
    if (n < 0) throw ScenarioError("traffic: payload_octets must be >= 0");
    const auto fill = parse_hex(t.value("fill", std::string("00")));
    if (fill.size() != 1) throw ScenarioError("traffic: fill must be a single octet");
    return std::vector<std::uint8_t>(static_cast<std::size_t>(n), fill[0]);
}

}  // namespace

int SimScenario::index_of(int id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id == id) return static_cast<int>(i);
    }
    throw ScenarioError("unknown node id " + std::to_string(id));
}

std::vector<std::vector<bool>> SimScenario::adjacency() const {
    const std::size_t n = nodes.size();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (int nb : nodes[i].neighbors) adj[i][static_cast<std::size_t>(index_of(nb))] = true;
    }
    if (range) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || !nodes[i].position || !nodes[j].position) continue;
                const double dx = nodes[i].position->first - nodes[j].position->first;
                const double dy = nodes[i].position->second - nodes[j].position->second;
                if (std::hypot(dx, dy) <= *range) adj[i][j] = true;
            }
        }
    }
    return adj;
}

void SimScenario::validate() const {
    if (nodes.empty()) throw ScenarioError("scenario has no nodes");
    std::set<int> ids;
    std::set<Address> addresses;
    for (const auto& n : nodes) {
        if (!ids.insert(n.id).second) throw ScenarioError("duplicate node id " + std::to_string(n.id));
        if (!addresses.insert(n.address).second) throw ScenarioError("duplicate address " + n.address.to_string());
        if (n.address.is_group()) throw ScenarioError("node address must be an ordinary (non-group) address");
        if (n.wake_us < 0) throw ScenarioError("wake_us must be >= 0");
        for (int nb : n.neighbors) {
            index_of(nb);
            if (nb == n.id) throw ScenarioError("node " + std::to_string(n.id) + " lists itself as neighbor");
        }
    }
    const auto adj = adjacency();
    for (std::size_t i = 0; i < adj.size(); ++i) {
        for (std::size_t j = 0; j < adj.size(); ++j) {
            if (adj[i][j] != adj[j][i]) {
                throw ScenarioError("asymmetric connectivity between nodes " + std::to_string(nodes[i].id) +
                                    " and " + std::to_string(nodes[j].id));
            }
        }
    }
    for (const auto& l : link_delays) {
        index_of(l.a);
        index_of(l.b);
        if (l.delay_us < 0) throw ScenarioError("link delay must be >= 0");
    }
    for (const auto& t : traffic) {
        index_of(t.src);
        if (t.dest != kBroadcastDest) {
            index_of(t.dest);
            if (t.dest == t.src) throw ScenarioError("traffic addressed to its own source");
        }
        if (t.payload.size() > kMaxPayloadOctets) throw ScenarioError("traffic payload exceeds 1500 octets");
        if (t.time_us < 0) throw ScenarioError("traffic time must be >= 0");
    }
    try {
        profile.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(std::string("profile: ") + e.what());
    }
    if (!(duration_us > 0)) throw ScenarioError("duration_us must be positive");
    const auto t = resolved_timing();
    if (!(t.sifs_us < t.nifs_us)) throw ScenarioError("SIFS must be shorter than NIFS");
    if (t.slot_time_us <= 0) throw ScenarioError("slot time must be positive");
    if (t.cw_min < 1 || t.cw_max < t.cw_min) throw ScenarioError("contention window bounds are invalid");
    if (t.retry_limit < 0) throw ScenarioError("retry limit must be >= 0");
    if (t.b_override_us && *t.b_override_us <= 0) throw ScenarioError("b_override_us must be positive");
    if (t.sense_window_us < 0) throw ScenarioError("sense_window_us must be >= 0");
}

TimingConfig SimScenario::resolved_timing() const {
    TimingConfig t = timing;
    const double tau = profile.symbol_duration_us;
    if (t.slot_time_us <= 0) t.slot_time_us = tau;
    if (t.sifs_us <= 0) t.sifs_us = 2 * tau;
    if (t.nifs_us <= 0) t.nifs_us = t.sifs_us + 2 * t.slot_time_us;
    double max_delay = 0;
    for (const auto& l : link_delays) max_delay = std::max(max_delay, l.delay_us);
    const double control = static_cast<double>(kControlSymbols) * tau;
    if (t.cts_timeout_us <= 0) t.cts_timeout_us = t.sifs_us + control + 2 * t.slot_time_us + 2 * max_delay;
    if (t.ack_timeout_us <= 0) t.ack_timeout_us = t.sifs_us + control + 2 * t.slot_time_us + 2 * max_delay;
    return t;
}

SimScenario parse_scenario_json(std::string_view text, const std::vector<DeviceProfile>& profiles) {
    SimScenario s;
    try {
        const auto doc = json::parse(text);
        const int version = doc.at("schema_version").get<int>();
        if (version != kScenarioSchemaVersion) {
            throw ScenarioError("unsupported scenario schema_version " + std::to_string(version));
        }
        s.profile = profile_from_json(doc.value("profile", json("Maxim 2820")), profiles);
        s.rng_seed = doc.value("rng_seed", std::uint64_t{0});
        s.duration_us = doc.at("duration_us").get<double>();
        if (doc.contains("range") && !doc.at("range").is_null()) s.range = doc.at("range").get<double>();

        for (const auto& jn : doc.at("nodes")) {
            NodeSpec n;
            n.id = jn.at("id").get<int>();
            n.address = jn.contains("address") ? Address::parse(jn.at("address").get<std::string>())
                                               : Address::from_index(static_cast<std::uint16_t>(n.id + 1));
            if (jn.contains("position")) {
                const auto& p = jn.at("position");
                n.position = std::make_pair(p.at(0).get<double>(), p.at(1).get<double>());
            }
            n.neighbors = jn.value("neighbors", std::vector<int>{});
            n.wake_us = jn.value("wake_us", 0.0);
            s.nodes.push_back(std::move(n));
        }
        for (const auto& jl : doc.value("links", json::array())) {
            s.link_delays.push_back({jl.at("a").get<int>(), jl.at("b").get<int>(), jl.value("delay_us", 0.0)});
        }
        for (const auto& jt : doc.value("traffic", json::array())) {
            TrafficSpec t;
            t.time_us = jt.at("time_us").get<double>();
            t.src = jt.at("src").get<int>();
            const auto& d = jt.at("dest");
            t.dest = d.is_string() && d.get<std::string>() == "broadcast" ? kBroadcastDest : d.get<int>();
            t.payload = payload_from_json(jt);
            s.traffic.push_back(std::move(t));
        }
        if (doc.contains("timing")) {
            const auto& jt = doc.at("timing");
            auto& t = s.timing;
            t.slot_time_us = jt.value("slot_time_us", 0.0);
            t.sifs_us = jt.value("sifs_us", 0.0);
            t.nifs_us = jt.value("nifs_us", 0.0);
            if (jt.contains("b_override_us") && !jt.at("b_override_us").is_null()) {
                t.b_override_us = jt.at("b_override_us").get<double>();
            }
            if (jt.contains("b_override_symbols") && !jt.at("b_override_symbols").is_null()) {
                t.b_override_us = jt.at("b_override_symbols").get<double>() * s.profile.symbol_duration_us;
            }
            t.cts_timeout_us = jt.value("cts_timeout_us", 0.0);
            t.ack_timeout_us = jt.value("ack_timeout_us", 0.0);
            t.sense_window_us = jt.value("sense_window_us", 0.0);
            t.cw_min = jt.value("cw_min", 16);
            t.cw_max = jt.value("cw_max", 1024);
            t.retry_limit = jt.value("retry_limit", 7);
            t.count_transients = jt.value("count_transients", false);
            t.virtual_carrier_sense = jt.value("virtual_carrier_sense", true);
        }
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(std::string("scenario: ") + e.what());
    }
    s.validate();
    return s;
}

SimScenario load_scenario(const std::string& path, const std::vector<DeviceProfile>& profiles) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_json(ss.str(), profiles);
}

}  // namespace rbnsize
