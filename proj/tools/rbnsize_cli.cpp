// rbnsize: command-line front end to the codec, run statistics, energy
// model, frame layer, corpus benchmark and MAC simulator.
//
// Machine output goes to stdout, everything else to stderr. The effective
// configuration is echoed to stderr as '#'-prefixed TOML so a run can be
// repeated from its log.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rbnsize/corpus_bench.hpp"
#include "rbnsize/energy_model.hpp"
#include "rbnsize/errors.hpp"
#include "rbnsize/mac_frames.hpp"
#include "rbnsize/mac_sim.hpp"
#include "rbnsize/rbn_codec.hpp"
#include "rbnsize/run_analysis.hpp"
#include "rbnsize/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rbnsize;

namespace {

// sysexits.h values
constexpr int kExitOk = 0;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitNoInput = 66;
constexpr int kExitIo = 74;

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Validation failure detected by the CLI itself (bad frame on input, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::string profile = "Maxim 2820";
    std::string profiles_file;
    std::optional<std::uint64_t> seed;
    bool json = false;
    bool ascii = false;
};

std::vector<DeviceProfile> profiles_for(const Globals& g) {
    return g.profiles_file.empty() ? builtin_profiles() : load_profiles(g.profiles_file);
}

std::string slurp(std::istream& in) {
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return slurp(in);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw OutputError("cannot write " + path);
    out << content;
    if (!out) throw OutputError("write failed on " + path);
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// Payload given as --text bits, --hex octets, --file bytes, or bit text on stdin.
struct BitInput {
    std::optional<std::string> text;
    std::optional<std::string> hex;
    std::optional<std::string> file;

    void attach(CLI::App* sub, const std::string& what) {
        auto* t = sub->add_option("--text", text, what + " as msb-left bit text");
        auto* h = sub->add_option("--hex", hex, what + " as hex octets (bit 0 of the first octet is the lsb)");
        auto* f = sub->add_option("--file", file, what + " read as raw bytes from a file");
        t->excludes(h)->excludes(f);
        h->excludes(f);
    }

    bool given() const { return text || hex || file; }

    BitString read() const {
        if (text) return BitString::from_text(*text);
        if (hex) return BitString::from_octets(parse_hex(*hex));
        if (file) return BitString::from_octets(read_file(*file));
        return BitString::from_text(trim(slurp(std::cin)));
    }
};

json energy_json(const EnergyBreakdown& e) {
    return {{"mode", std::string(to_string(e.mode))},
            {"symbols", e.symbols},
            {"energized_symbols", e.energized_symbols},
            {"turn_ons", e.turn_ons},
            {"tx_uj", e.tx_energy_uj},
            {"idle_uj", e.idle_energy_uj},
            {"transient_uj", e.transient_energy_uj},
            {"total_uj", e.total_uj}};
}

// ---- encode / decode ------------------------------------------------------

struct EncodeOpts {
    BitInput in;
    bool stages = false;
};

int cmd_encode(const Globals& g, const EncodeOpts& o) {
    const BitString bits = o.in.read();
    // No input bits, no symbols: the carry slot only exists for real frames.
    if (bits.empty()) {
        if (g.json) std::cout << json{{"bits", ""}, {"rbn", ""}, {"weight", 0}}.dump() << '\n';
        return kExitOk;
    }
    const RbnString enc = encode_rbn(bits);
    if (g.json) {
        json j{{"bits", bits.to_text()},
               {"rbn", enc.to_text(g.ascii)},
               {"digits", enc.size()},
               {"weight", weight(enc)},
               {"binary_weight", bits.popcount()},
               {"value", value_of_rbn(enc).str()}};
        if (o.stages) j["replaced"] = replace_runs(bits).to_text(g.ascii);
        std::cout << j.dump() << '\n';
    } else {
        if (o.stages) {
            std::cout << "replaced: " << replace_runs(bits).to_text(g.ascii) << '\n'
                      << "folded:   " << enc.to_text(g.ascii) << '\n';
        } else {
            std::cout << enc.to_text(g.ascii) << '\n';
        }
    }
    return kExitOk;
}

struct DecodeOpts {
    std::optional<std::string> text;
};

int cmd_decode(const Globals& g, const DecodeOpts& o) {
    const std::string text = o.text ? *o.text : trim(slurp(std::cin));
    const RbnString digits = RbnString::from_text(text);
    if (digits.empty()) {
        if (g.json) std::cout << json{{"rbn", ""}, {"bits", ""}}.dump() << '\n';
        return kExitOk;
    }
    const BitString bits = decode_rbn(digits);
    if (g.json) {
        std::cout << json{{"rbn", digits.to_text(g.ascii)}, {"bits", bits.to_text()},
                          {"value", value_of_bits(bits).str()}}
                         .dump()
                  << '\n';
    } else {
        std::cout << bits.to_text() << '\n';
    }
    return kExitOk;
}

// ---- stats ----------------------------------------------------------------

struct StatsOpts {
    int n = 8;
    bool deviation = false;
    int n_max = 16;
    std::optional<int> occurrence_k;
    std::string csv_out;
};

json rational_json(const Rational& r) {
    if (r.is_integer()) return r.num;
    return r.to_string();
}

int cmd_stats(const Globals& g, const StatsOpts& o) {
    std::string csv;
    json j;
    if (o.deviation) {
        const auto rows = nonzero_deviation_report(o.n_max);
        csv = deviation_csv(rows);
        for (const auto& r : rows) {
            j["deviation"].push_back({{"n", r.n},
                                      {"formula", rational_json(r.formula)},
                                      {"measured", r.measured},
                                      {"deviation", r.deviation},
                                      {"relative_deviation", r.relative_deviation}});
        }
    } else if (o.occurrence_k) {
        const int k = *o.occurrence_k;
        std::ostringstream os;
        os << "n,k,runs,strings,count\n";
        for (int i = 1; i <= max_runs(o.n, k); ++i) {
            const auto c = occurrence_count(o.n, k, i);
            os << c.n << ',' << c.k << ',' << c.runs << ',' << c.strings << ',' << c.count << '\n';
            j["occurrences"].push_back(
                {{"n", c.n}, {"k", c.k}, {"runs", c.runs}, {"strings", c.strings}, {"count", c.count}});
        }
        csv = os.str();
    } else {
        const auto table = run_count_table(o.n);
        csv = run_table_csv(table);
        j["n"] = o.n;
        for (int k = 1; k <= o.n; ++k) {
            j["rows"].push_back({{"k", k}, {"max_runs", max_runs(o.n, k)}, {"occurrences", table.at(k)}});
        }
    }
    if (!o.csv_out.empty()) write_file(o.csv_out, csv);
    std::cout << (g.json ? j.dump(2) + "\n" : csv);
    return kExitOk;
}

// ---- energy ---------------------------------------------------------------

struct EnergyOpts {
    BitInput in;
    std::int64_t n = 1024;
    bool transients = false;
    bool dump_profiles = false;
};

int cmd_energy(const Globals& g, const EnergyOpts& o) {
    const auto profiles = profiles_for(g);
    if (o.dump_profiles) {
        std::cout << profiles_to_json(profiles) << '\n';
        return kExitOk;
    }
    if (!o.in.given()) {
        json j = json::array();
        std::ostringstream os;
        os.setf(std::ios::fixed);
        os.precision(2);
        os << "device,gamma_size_pct,gamma_dev_pct\n";
        for (const auto& p : profiles) {
            const double gs = 100.0 * gamma_size(p);
            const double gd = 100.0 * gamma_dev(p, o.n);
            os << p.name << ',' << gs << ',' << gd << '\n';
            j.push_back({{"device", p.name}, {"n", o.n}, {"gamma_size_pct", gs}, {"gamma_dev_pct", gd}});
        }
        std::cout << (g.json ? j.dump(2) + "\n" : os.str());
        return kExitOk;
    }

    const DeviceProfile& p = find_profile(profiles, g.profile);
    const BitString bits = o.in.read();
    const auto ebt = frame_energy(bits, p, TxMode::EbT, o.transients);
    const auto size = frame_energy(bits, p, TxMode::SiZe, o.transients);
    const auto rbn = frame_energy(encode_rbn(bits), p, TxMode::RBN, o.transients);
    if (g.json) {
        std::cout << json{{"device", p.name},
                          {"bits", bits.size()},
                          {"modes", {energy_json(ebt), energy_json(size), energy_json(rbn)}}}
                         .dump(2)
                  << '\n';
    } else {
        std::cout << "mode,symbols,energized,turn_ons,tx_uj,idle_uj,transient_uj,total_uj\n";
        for (const auto* e : {&ebt, &size, &rbn}) {
            std::cout << to_string(e->mode) << ',' << e->symbols << ',' << e->energized_symbols << ','
                      << e->turn_ons << ',' << e->tx_energy_uj << ',' << e->idle_energy_uj << ','
                      << e->transient_energy_uj << ',' << e->total_uj << '\n';
        }
    }
    return kExitOk;
}

// ---- frame ----------------------------------------------------------------

Address parse_address(const std::string& text) {
    return text == "broadcast" ? Address::broadcast() : Address::parse(text);
}

FrameType parse_frame_type(std::string text) {
    for (auto& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (text == "data") return FrameType::Data;
    if (text == "rts") return FrameType::Rts;
    if (text == "cts") return FrameType::Cts;
    if (text == "ack") return FrameType::Ack;
    throw std::invalid_argument("unknown frame type: " + text);
}

json frame_json(const AnyFrame& any) {
    return std::visit(
        [](const auto& f) -> json {
            using F = std::decay_t<decltype(f)>;
            json j{{"dest", f.dest.to_string()},
                   {"src", f.src.to_string()},
                   {"length", f.length},
                   {"checksum", [&] {
                        char buf[11];
                        std::snprintf(buf, sizeof buf, "0x%08X", f.checksum);
                        return std::string(buf);
                    }()}};
            if constexpr (std::is_same_v<F, DataFrame>) {
                j["type"] = "DATA";
                j["payload_hex"] = trim(hex_dump(f.payload_bits.to_octets()));
                j["payload_weight"] = weight(f.payload);
            } else {
                j["type"] = std::string(to_string(f.type));
            }
            return j;
        },
        any);
}

struct FrameBuildOpts {
    std::string type = "data";
    std::string dest = "broadcast";
    std::string src = "00:00:00:00:00:01";
    std::string payload_hex;
    std::uint16_t length = 0;
    std::string hex_out;
    std::string symbols_out;
};

int cmd_frame_build(const Globals& g, const FrameBuildOpts& o) {
    const FrameType type = parse_frame_type(o.type);
    const Address dest = parse_address(o.dest);
    const Address src = parse_address(o.src);
    SymbolStream symbols;
    std::vector<std::uint8_t> image;
    AnyFrame frame;
    if (type == FrameType::Data) {
        auto built = build_data_frame(dest, src, parse_hex(o.payload_hex));
        image = frame_octets(built.frame);
        symbols = std::move(built.symbols);
        frame = std::move(built.frame);
    } else {
        auto built = build_control_frame(type, dest, src, o.length);
        image = frame_octets(built.frame);
        symbols = std::move(built.symbols);
        frame = built.frame;
    }
    const std::string sym_text = symbols_to_text(symbols);
    if (!o.hex_out.empty()) write_file(o.hex_out, hex_dump(image));
    if (!o.symbols_out.empty()) write_file(o.symbols_out, sym_text + "\n");
    if (g.json) {
        json j = frame_json(frame);
        j["hex"] = hex_dump(image);
        j["symbols"] = sym_text;
        j["symbol_count"] = symbols.size();
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << sym_text << '\n';
    }
    return kExitOk;
}

struct FrameParseOpts {
    std::optional<std::string> symbols;
    std::optional<std::string> symbols_file;
    std::optional<std::string> hex_file;
};

SymbolStream read_symbols(const FrameParseOpts& o) {
    if (o.hex_file) return symbols_from_image(parse_hex(read_text_file(*o.hex_file)));
    if (o.symbols) return symbols_from_text(*o.symbols);
    if (o.symbols_file) return symbols_from_text(read_text_file(*o.symbols_file));
    return symbols_from_text(slurp(std::cin));
}

int cmd_frame_parse(const Globals& g, const FrameParseOpts& o) {
    const auto symbols = read_symbols(o);
    const auto r = parse_frame(symbols);
    if (!r.ok()) throw DataError(std::string(to_string(r.error)) + ": " + r.detail);
    json j = frame_json(*r.frame);
    if (g.json) {
        std::cout << j.dump(2) << '\n';
    } else {
        for (const auto& [k, v] : j.items()) {
            std::cout << k << '=' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
        }
    }
    return kExitOk;
}

// Region-by-region symbol and energy breakdown. Binary regions are always
// energized; only payload zeros are silent.
int cmd_frame_inspect(const Globals& g, const FrameParseOpts& o) {
    const auto profiles = profiles_for(g);
    const DeviceProfile& p = find_profile(profiles, g.profile);
    const auto symbols = read_symbols(o);
    const auto r = parse_frame(symbols);
    if (!r.ok()) throw DataError(std::string(to_string(r.error)) + ": " + r.detail);

    struct Region {
        std::string name;
        std::size_t begin, end;
    };
    std::vector<Region> regions;
    if (std::holds_alternative<DataFrame>(*r.frame)) {
        const std::size_t trailer = symbols.size() - kTrailerSymbols;
        regions = {{"header", 0, kDataHeaderSymbols},
                   {"payload", kDataHeaderSymbols, trailer},
                   {"trailer", trailer, symbols.size()}};
    } else {
        regions = {{"control", 0, symbols.size()}};
    }
    json j = frame_json(*r.frame);
    j["device"] = p.name;
    EnergyBreakdown total;
    total.mode = TxMode::RBN;
    for (const auto& reg : regions) {
        const auto e = price_symbols(std::span(symbols).subspan(reg.begin, reg.end - reg.begin), p);
        total += e;
        j["regions"].push_back({{"region", reg.name}, {"energy", energy_json(e)}});
    }
    j["total"] = energy_json(total);
    j["duration_us"] = static_cast<double>(symbols.size()) * p.symbol_duration_us;
    if (g.json) {
        std::cout << j.dump(2) << '\n';
        return kExitOk;
    }
    std::cout << "region,symbols,energized,tx_uj,idle_uj,total_uj\n";
    for (const auto& reg : j["regions"]) {
        const auto& e = reg["energy"];
        std::cout << reg["region"].get<std::string>() << ',' << e["symbols"] << ',' << e["energized_symbols"]
                  << ',' << e["tx_uj"] << ',' << e["idle_uj"] << ',' << e["total_uj"] << '\n';
    }
    const auto& e = j["total"];
    std::cout << "total," << e["symbols"] << ',' << e["energized_symbols"] << ',' << e["tx_uj"] << ','
              << e["idle_uj"] << ',' << e["total_uj"] << '\n';
    return kExitOk;
}

// ---- bench ----------------------------------------------------------------

struct BenchOpts {
    std::string corpus;
    std::vector<std::string> files;
    std::size_t frame_bits = kDefaultFrameBits;
    bool sweep = false;
    bool devices = false;
    std::string csv_out;
    std::string json_out;
    std::string plot_dir;
};

void write_series(const fs::path& path, const std::vector<std::pair<double, double>>& xy) {
    std::ostringstream os;
    os.precision(8);
    os << "x,y\n";
    for (const auto& [x, y] : xy) os << x << ',' << y << '\n';
    write_file(path.string(), os.str());
}

int cmd_bench(const Globals& g, const BenchOpts& o) {
    const auto profiles = profiles_for(g);
    if (o.corpus.empty() && o.files.empty()) throw CLI::ValidationError("bench", "need --corpus or --file");

    if (o.sweep) {
        if (o.files.empty()) throw CLI::ValidationError("bench", "--sweep needs --file");
        json j = json::array();
        std::string csv;
        for (const auto& f : o.files) {
            const auto r = frame_size_sweep(fs::path(f));
            csv += "# " + f + (r.non_decreasing ? "" : " (not monotone)") + "\n" + r.to_csv();
            json pts = json::array();
            for (const auto& p : r.points) {
                pts.push_back({{"frame_bits", p.frame_bits},
                               {"zero_fraction_binary", p.zero_fraction_binary},
                               {"gamma_rbn_ideal", p.gamma_rbn_ideal}});
            }
            j.push_back({{"file", f}, {"non_decreasing", r.non_decreasing}, {"dips", r.dips}, {"points", pts}});
            if (!o.plot_dir.empty()) {
                fs::create_directories(o.plot_dir);
                std::vector<std::pair<double, double>> xy;
                for (const auto& p : r.points) xy.emplace_back(static_cast<double>(p.frame_bits), p.gamma_rbn_ideal);
                write_series(fs::path(o.plot_dir) / ("sweep_" + fs::path(f).filename().string() + ".csv"), xy);
            }
        }
        if (!o.csv_out.empty()) write_file(o.csv_out, csv);
        if (!o.json_out.empty()) write_file(o.json_out, j.dump(2));
        std::cout << (g.json ? j.dump(2) + "\n" : csv);
        return kExitOk;
    }

    CorpusReport report;
    if (!o.corpus.empty()) {
        report = analyze_corpus(o.corpus, o.frame_bits);
    } else {
        report.frame_bits = o.frame_bits;
        for (const auto& f : o.files) report.files.push_back(analyze_file(f, o.frame_bits, "files"));
        report.suites.push_back(summarize("files", report.files));
        report.overall = summarize({}, report.files);
        report.overall.suite = "ALL";
    }

    std::string csv = report.to_csv();
    json j = json::parse(report.to_json());
    if (o.devices) {
        const auto rows = device_report(report, profiles);
        csv += "\n" + device_report_csv(rows);
        for (const auto& r : rows) {
            j["devices"].push_back({{"device", r.device},
                                    {"suite", r.suite},
                                    {"gamma_sim_size", r.gamma_sim_size},
                                    {"gamma_sim_dev", r.gamma_sim_dev},
                                    {"gamma_size_ideal", r.gamma_size_ideal},
                                    {"gamma_rbn_ideal", r.gamma_rbn_ideal}});
        }
    }
    if (!o.plot_dir.empty()) {
        fs::create_directories(o.plot_dir);
        std::vector<std::pair<double, double>> zf, rb;
        for (std::size_t i = 0; i < report.files.size(); ++i) {
            zf.emplace_back(static_cast<double>(i), report.files[i].tally.gamma_size_ideal());
            rb.emplace_back(static_cast<double>(i), report.files[i].tally.gamma_rbn_ideal());
        }
        write_series(fs::path(o.plot_dir) / "files_gamma_size_ideal.csv", zf);
        write_series(fs::path(o.plot_dir) / "files_gamma_rbn_ideal.csv", rb);
        std::string index = "x,suite,file\n";
        for (std::size_t i = 0; i < report.files.size(); ++i) {
            index += std::to_string(i) + ',' + report.files[i].suite + ',' + report.files[i].file + '\n';
        }
        write_file((fs::path(o.plot_dir) / "files_index.csv").string(), index);
    }
    if (!o.csv_out.empty()) write_file(o.csv_out, csv);
    if (!o.json_out.empty()) write_file(o.json_out, j.dump(2));
    std::cout << (g.json ? j.dump(2) + "\n" : csv);
    return kExitOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateOpts {
    std::string scenario;
    std::string trace_out;
    std::optional<double> b_override_symbols;
    std::optional<double> duration_us;
};

int cmd_simulate(const Globals& g, const SimulateOpts& o) {
    SimScenario s = load_scenario(o.scenario, profiles_for(g));
    if (g.seed) s.rng_seed = *g.seed;
    if (o.b_override_symbols) s.timing.b_override_us = *o.b_override_symbols * s.profile.symbol_duration_us;
    if (o.duration_us) s.duration_us = *o.duration_us;
    s.validate();
    std::cerr << "# scenario.rng_seed=" << s.rng_seed << '\n';
    const SimResult r = run(s);
    if (!o.trace_out.empty()) {
        write_file(o.trace_out, format_trace(r.trace));
    }
    std::cout << r.metrics.to_json() << '\n';
    return kExitOk;
}

void print_effective_config(const CLI::App& app) {
    std::string path;
    for (const auto* sub = &app; !sub->get_subcommands().empty();) {
        sub = sub->get_subcommands().front();
        path += (path.empty() ? "" : ".") + sub->get_name();
    }
    std::cerr << "# rbnsize " << path << '\n';
    std::istringstream cfg(app.config_to_str(true, false));
    for (std::string line; std::getline(cfg, line);) {
        const auto key = line.substr(0, line.find('='));
        // globals, plus options of the subcommand that ran
        const bool global = key.find('.') == std::string::npos;
        const bool ours = key.rfind(path + ".", 0) == 0 && key.find('.', path.size() + 1) == std::string::npos;
        if (!line.empty() && (global || ours)) std::cerr << "# " << line << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Redundant-binary silent-zero transmission toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    std::uint64_t seed = 0;
    app.add_option("--profile", g.profile, "Radio profile name")->capture_default_str();
    app.add_option("--profiles-file", g.profiles_file, "Profile config (JSON, schema_version 1)");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the scenario's rng_seed)");
    app.add_flag("--json", g.json, "JSON output");
    app.add_flag("--ascii", g.ascii, "Print -1 digits as T instead of 1̄");

    std::function<int()> run_cmd;

    EncodeOpts enc;
    auto* c_enc = app.add_subcommand("encode", "Binary to canonical RBN");
    enc.in.attach(c_enc, "input");
    c_enc->add_flag("--stages", enc.stages, "Also show the run-replacement stage");
    c_enc->callback([&] { run_cmd = [&] { return cmd_encode(g, enc); }; });

    DecodeOpts dec;
    auto* c_dec = app.add_subcommand("decode", "RBN back to binary");
    c_dec->add_option("--text", dec.text, "msb-left RBN text over {0,1,T,1̄}");
    c_dec->callback([&] { run_cmd = [&] { return cmd_decode(g, dec); }; });

    StatsOpts st;
    auto* c_st = app.add_subcommand("stats", "Run-length table, occurrence counts, non-zero deviation report");
    c_st->add_option("--n", st.n, "String length")->check(CLI::Range(1, kMaxTableBits))->capture_default_str();
    auto* dev = c_st->add_flag("--deviation", st.deviation, "Measured vs closed-form non-zero totals");
    c_st->add_option("--n-max", st.n_max, "Largest n in the deviation report")
        ->check(CLI::Range(1, kMaxMeasuredBits))
        ->capture_default_str();
    c_st->add_option("--occurrence", st.occurrence_k, "Occurrence counts for runs of this length")
        ->check(CLI::PositiveNumber)
        ->excludes(dev);
    c_st->add_option("--csv-out", st.csv_out, "Also write the CSV here");
    c_st->callback([&] { run_cmd = [&] { return cmd_stats(g, st); }; });

    EnergyOpts en;
    auto* c_en = app.add_subcommand("energy", "Savings table, or price one payload in EbT/SiZe/RBN");
    en.in.attach(c_en, "payload");
    c_en->add_option("--n", en.n, "Frame bits for the savings table")->check(CLI::PositiveNumber)->capture_default_str();
    c_en->add_flag("--transients", en.transients, "Charge a turn-on transient per silent-to-energized edge");
    c_en->add_flag("--dump-profiles", en.dump_profiles, "Print the profile config and exit");
    c_en->callback([&] { run_cmd = [&] { return cmd_energy(g, en); }; });

    auto* c_fr = app.add_subcommand("frame", "Build, parse or inspect MAC frames");
    c_fr->require_subcommand(1);
    FrameBuildOpts fb;
    auto* c_fb = c_fr->add_subcommand("build", "Build a frame; prints the symbol stream");
    c_fb->add_option("--type", fb.type, "data|rts|cts|ack")->capture_default_str();
    c_fb->add_option("--dest", fb.dest, "Destination address or 'broadcast'")->capture_default_str();
    c_fb->add_option("--src", fb.src, "Source address")->capture_default_str();
    c_fb->add_option("--payload-hex", fb.payload_hex, "Data payload octets");
    c_fb->add_option("--length", fb.length, "Length field of a control frame");
    c_fb->add_option("--hex-out", fb.hex_out, "Write the binary image as a hex dump");
    c_fb->add_option("--symbols-out", fb.symbols_out, "Write the symbol stream sidecar");
    c_fb->callback([&] { run_cmd = [&] { return cmd_frame_build(g, fb); }; });

    FrameParseOpts fp;
    auto add_frame_input = [&fp](CLI::App* sub) {
        auto* a = sub->add_option("--symbols", fp.symbols, "Symbol text over {+,0,-,x}");
        auto* b = sub->add_option("--symbols-file", fp.symbols_file, "Symbol sidecar file");
        auto* c = sub->add_option("--hex-file", fp.hex_file, "Hex-dump frame image");
        a->excludes(b)->excludes(c);
        b->excludes(c);
    };
    auto* c_fp = c_fr->add_subcommand("parse", "Parse a symbol stream; exit 65 on a bad frame");
    add_frame_input(c_fp);
    c_fp->callback([&] { run_cmd = [&] { return cmd_frame_parse(g, fp); }; });
    auto* c_fi = c_fr->add_subcommand("inspect", "Per-region symbol and energy breakdown");
    add_frame_input(c_fi);
    c_fi->callback([&] { run_cmd = [&] { return cmd_frame_inspect(g, fp); }; });

    BenchOpts be;
    auto* c_be = app.add_subcommand("bench", "Corpus zero-fraction and savings benchmark");
    c_be->add_option("--corpus", be.corpus, "Corpus root (one sub-directory per suite)");
    c_be->add_option("--file", be.files, "Individual files");
    c_be->add_option("--frame-bits", be.frame_bits, "Frame size in bits")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_be->add_flag("--sweep", be.sweep, "Frame-size sweep over each --file");
    c_be->add_flag("--devices", be.devices, "Add per-device savings");
    c_be->add_option("--csv-out", be.csv_out, "Write the CSV report here");
    c_be->add_option("--json-out", be.json_out, "Write the JSON report here");
    c_be->add_option("--plot-dir", be.plot_dir, "Write x,y series files here");
    c_be->callback([&] { run_cmd = [&] { return cmd_bench(g, be); }; });

    SimulateOpts si;
    auto* c_si = app.add_subcommand("simulate", "Run a MAC scenario; metrics JSON on stdout");
    c_si->add_option("--scenario", si.scenario, "Scenario file")->required();
    c_si->add_option("--trace-out", si.trace_out, "Write the event trace here");
    c_si->add_option("--b-override-symbols", si.b_override_symbols, "Replace the wait-b interval (in symbols)");
    c_si->add_option("--duration-us", si.duration_us, "Override the scenario duration");
    c_si->callback([&] { run_cmd = [&] { return cmd_simulate(g, si); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    if (seed_opt->count() > 0) g.seed = seed;
    print_effective_config(app);

    try {
        if (!g.profiles_file.empty()) profiles_for(g);  // fail early on a bad config, whatever the command
        return run_cmd ? run_cmd() : kExitUsage;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "rbnsize: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "rbnsize: " << e.what() << '\n';
        return kExitNoInput;
    } catch (const OutputError& e) {
        std::cerr << "rbnsize: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "rbnsize: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        // RbnError, ScenarioError, DataError, invalid_argument, out_of_range
        std::cerr << "rbnsize: " << e.what() << '\n';
        return kExitData;
    }
}
