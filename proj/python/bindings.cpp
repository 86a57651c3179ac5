// Python bindings: thin wrappers that trade in str, bytes, int and dict.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "rbnsize/corpus_bench.hpp"
#include "rbnsize/energy_model.hpp"
#include "rbnsize/mac_frames.hpp"
#include "rbnsize/mac_sim.hpp"
#include "rbnsize/rbn_codec.hpp"
#include "rbnsize/run_analysis.hpp"
#include "rbnsize/scenario.hpp"

namespace py = pybind11;
using namespace rbnsize;

namespace {

std::vector<std::uint8_t> to_vec(const py::bytes& b) {
    const std::string s = b;
    return {s.begin(), s.end()};
}

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
    return {reinterpret_cast<const char*>(v.data()), v.size()};
}

py::dict profile_dict(const DeviceProfile& p) {
    py::dict d;
    d["name"] = p.name;
    d["data_rate_kbps"] = p.data_rate_kbps;
    d["symbol_duration_us"] = p.symbol_duration_us;
    d["v_cc"] = p.v_cc;
    d["i_high_ma"] = p.i_high_ma;
    d["i_low_ma"] = p.i_low_ma;
    d["t_on_us"] = p.t_on_us;
    return d;
}

py::dict energy_dict(const EnergyBreakdown& e) {
    py::dict d;
    d["mode"] = std::string(to_string(e.mode));
    d["symbols"] = e.symbols;
    d["energized_symbols"] = e.energized_symbols;
    d["turn_ons"] = e.turn_ons;
    d["tx_energy_uj"] = e.tx_energy_uj;
    d["idle_energy_uj"] = e.idle_energy_uj;
    d["transient_energy_uj"] = e.transient_energy_uj;
    d["total_uj"] = e.total_uj;
    return d;
}

py::dict tally_dict(const SymbolTally& t) {
    py::dict d;
    d["bytes"] = t.bytes;
    d["frames"] = t.frames;
    d["binary_bits"] = t.binary_bits;
    d["binary_zeros"] = t.binary_zeros;
    d["rbn_symbols"] = t.rbn_symbols;
    d["rbn_nonzeros"] = t.rbn_nonzeros;
    d["zero_fraction_binary"] = t.zero_fraction_binary();
    d["nonzero_fraction_rbn"] = t.nonzero_fraction_rbn();
    d["gamma_size_ideal"] = t.gamma_size_ideal();
    d["gamma_rbn_ideal"] = t.gamma_rbn_ideal();
    return d;
}

py::object json_to_py(const std::string& text) {
    return py::module_::import("json").attr("loads")(text);
}

py::dict data_frame_dict(const DataFrame& f) {
    py::dict d;
    d["type"] = "DATA";
    d["dest"] = f.dest.to_string();
    d["src"] = f.src.to_string();
    d["length"] = f.length;
    d["payload"] = to_bytes(f.payload_bits.to_octets());
    d["payload_rbn"] = f.payload.to_text(true);
    d["checksum"] = f.checksum;
    return d;
}

py::dict control_frame_dict(const ControlFrame& f) {
    py::dict d;
    d["type"] = std::string(to_string(f.type));
    d["dest"] = f.dest.to_string();
    d["src"] = f.src.to_string();
    d["length"] = f.length;
    d["checksum"] = f.checksum;
    return d;
}

Address address_arg(const std::string& text) {
    return text == "broadcast" ? Address::broadcast() : Address::parse(text);
}

const DeviceProfile& profile_arg(const std::string& name) { return find_profile(builtin_profiles(), name); }

}  // namespace

PYBIND11_MODULE(_rbnsize, m) {
    m.doc() = "Redundant-binary silent-zero encoding, energy pricing, frames and MAC simulation";

    static py::exception<RbnError> rbn_error(m, "RbnError", PyExc_ValueError);
    static py::exception<ScenarioError> scenario_error(m, "ScenarioError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const RbnError& e) {
            py::set_error(rbn_error, e.what());
        } catch (const ScenarioError& e) {
            py::set_error(scenario_error, e.what());
        } catch (const IoError& e) {
            py::set_error(PyExc_OSError, e.what());
        }
    });

    // codec
    m.def(
        "encode", [](const std::string& bits, bool ascii) { return encode_rbn(BitString::from_text(bits)).to_text(ascii); },
        py::arg("bits"), py::arg("ascii") = true, "Encode msb-left binary text; returns msb-left RBN text.");
    m.def(
        "decode", [](const std::string& rbn) { return decode_rbn(RbnString::from_text(rbn)).to_text(); },
        py::arg("rbn"), "Decode msb-left RBN text back to binary text.");
    m.def(
        "encode_digits", [](const py::bytes& data) { return encode_rbn(BitString::from_octets(to_vec(data))).digits(); },
        py::arg("data"), "Encode octets (lsb first); returns RBN digits lsb first.");
    m.def(
        "weight", [](const std::string& rbn) { return weight(RbnString::from_text(rbn)); }, py::arg("rbn"));

    // run analysis
    m.def(
        "run_count_table",
        [](int n) {
            auto rows = run_count_table(n).rows;
            return std::vector<std::uint64_t>(rows.begin() + 1, rows.end());
        },
        py::arg("n"), "Occurrences of runs of k = 1..n ones over all n-bit strings.");
    m.def(
        "occurrence_count",
        [](int n, int k, int runs) {
            const auto c = occurrence_count(n, k, runs);
            py::dict d;
            d["n"] = c.n;
            d["k"] = c.k;
            d["runs"] = c.runs;
            d["strings"] = c.strings;
            d["count"] = c.count;
            return d;
        },
        py::arg("n"), py::arg("k"), py::arg("runs"));
    m.def(
        "_formula_total_nonzeros",
        [](int n) {
            const auto r = formula_total_nonzeros(n);
            return std::make_pair(r.num, r.den);
        },
        py::arg("n"));
    m.def("measured_total_nonzeros", &measured_total_nonzeros, py::arg("n"));
    m.def(
        "deviation_csv", [](int n_max) { return deviation_csv(nonzero_deviation_report(n_max)); }, py::arg("n_max"));

    // energy
    m.def("profiles", [] {
        py::list out;
        for (const auto& p : builtin_profiles()) out.append(profile_dict(p));
        return out;
    });
    m.def(
        "gamma_size", [](const std::string& device) { return gamma_size(profile_arg(device)); }, py::arg("device"));
    m.def(
        "gamma_dev", [](const std::string& device, std::int64_t n) { return gamma_dev(profile_arg(device), n); },
        py::arg("device"), py::arg("n") = 1024);
    m.def(
        "frame_energy",
        [](const std::string& bits, const std::string& device, const std::string& mode, bool transients) {
            const auto& p = profile_arg(device);
            const auto tm = tx_mode_from_string(mode);
            const auto b = BitString::from_text(bits);
            return energy_dict(tm == TxMode::RBN ? frame_energy(encode_rbn(b), p, tm, transients)
                                                 : frame_energy(b, p, tm, transients));
        },
        py::arg("bits"), py::arg("device") = "Maxim 2820", py::arg("mode") = "RBN", py::arg("transients") = false,
        "Price msb-left binary text in EbT, SiZe or RBN mode.");

    // frames
    m.def(
        "build_data_frame",
        [](const std::string& dest, const std::string& src, const py::bytes& payload) {
            const auto built = build_data_frame(address_arg(dest), address_arg(src), to_vec(payload));
            py::dict d = data_frame_dict(built.frame);
            d["symbols"] = symbols_to_text(built.symbols);
            d["image"] = to_bytes(frame_octets(built.frame));
            return d;
        },
        py::arg("dest"), py::arg("src"), py::arg("payload"));
    m.def(
        "build_control_frame",
        [](const std::string& type, const std::string& dest, const std::string& src, std::uint16_t length) {
            FrameType t;
            if (type == "RTS") t = FrameType::Rts;
            else if (type == "CTS") t = FrameType::Cts;
            else if (type == "ACK") t = FrameType::Ack;
            else throw std::invalid_argument("control frame type must be RTS, CTS or ACK");
            const auto built = build_control_frame(t, address_arg(dest), address_arg(src), length);
            py::dict d = control_frame_dict(built.frame);
            d["symbols"] = symbols_to_text(built.symbols);
            d["image"] = to_bytes(frame_octets(built.frame));
            return d;
        },
        py::arg("type"), py::arg("dest"), py::arg("src"), py::arg("length") = 0);
    m.def(
        "parse_frame",
        [](const std::string& symbols) {
            const auto r = parse_frame(symbols_from_text(symbols));
            py::dict d;
            d["ok"] = r.ok();
            d["error"] = std::string(to_string(r.error));
            d["detail"] = r.detail;
            if (r.ok()) {
                d["frame"] = std::visit(
                    [](const auto& f) -> py::dict {
                        if constexpr (std::is_same_v<std::decay_t<decltype(f)>, DataFrame>) return data_frame_dict(f);
                        else return control_frame_dict(f);
                    },
                    *r.frame);
            }
            return d;
        },
        py::arg("symbols"), "Parse on-air symbol text (+, 0, -, x).");
    m.def(
        "crc32", [](const py::bytes& data) { return crc32(std::span<const std::uint8_t>(to_vec(data))); },
        py::arg("data"));

    // corpus
    m.def(
        "analyze_bytes",
        [](const py::bytes& data, std::size_t frame_bits) { return tally_dict(analyze_bytes(to_vec(data), frame_bits)); },
        py::arg("data"), py::arg("frame_bits") = kDefaultFrameBits);
    m.def(
        "analyze_corpus",
        [](const std::string& root, std::size_t frame_bits) {
            std::string json;
            {
                py::gil_scoped_release release;
                json = analyze_corpus(std::filesystem::path(root), frame_bits).to_json();
            }
            return json_to_py(json);
        },
        py::arg("root"), py::arg("frame_bits") = kDefaultFrameBits);

    // simulation
    m.def(
        "simulate",
        [](const std::string& scenario_json, std::optional<std::uint64_t> seed, bool trace) {
            auto s = parse_scenario_json(scenario_json, builtin_profiles());
            if (seed) s.rng_seed = *seed;
            SimResult r;
            {
                py::gil_scoped_release release;
                r = run(s);
            }
            py::dict d;
            d["metrics"] = json_to_py(r.metrics.to_json());
            if (trace) d["trace"] = format_trace(r.trace);
            return d;
        },
        py::arg("scenario_json"), py::arg("seed") = py::none(), py::arg("trace") = false,
        "Run a scenario given as JSON text; returns metrics and optionally the trace.");
}
