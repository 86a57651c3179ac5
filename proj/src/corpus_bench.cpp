#include "rbnsize/corpus_bench.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "rbnsize/rbn_codec.hpp"

namespace rbnsize {

namespace fs = std::filesystem;

SymbolTally& SymbolTally::operator+=(const SymbolTally& o) {
    bytes += o.bytes;
    frames += o.frames;
    binary_bits += o.binary_bits;
    binary_zeros += o.binary_zeros;
    rbn_symbols += o.rbn_symbols;
    rbn_nonzeros += o.rbn_nonzeros;
    return *this;
}

double SymbolTally::zero_fraction_binary() const noexcept {
    return binary_bits ? static_cast<double>(binary_zeros) / static_cast<double>(binary_bits) : 0.0;
}

double SymbolTally::nonzero_fraction_rbn() const noexcept {
    return binary_bits ? static_cast<double>(rbn_nonzeros) / static_cast<double>(binary_bits) : 0.0;
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read error on " + path.string());
    return data;
}

SymbolTally analyze_bytes(const std::vector<std::uint8_t>& data, std::size_t frame_bits) {
    if (frame_bits == 0) throw std::invalid_argument("frame size must be positive");
    const BitString all = BitString::from_octets(data);
    SymbolTally t;
    t.bytes = data.size();
    t.binary_bits = all.size();
    t.binary_zeros = all.size() - all.popcount();
    for (std::size_t pos = 0; pos < all.size(); pos += frame_bits) {
        const BitString frame = all.slice(pos, frame_bits);
        const RbnString enc = encode_rbn(frame);
        ++t.frames;
        t.rbn_symbols += enc.size();
        t.rbn_nonzeros += weight(enc);
    }
    return t;
}

FileRecord analyze_file(const fs::path& path, std::size_t frame_bits, const std::string& suite) {
    return FileRecord{path.filename().string(), suite, analyze_bytes(read_file(path), frame_bits)};
}

SuiteRecord summarize(const std::string& suite, const std::vector<FileRecord>& files) {
    SuiteRecord s;
    s.suite = suite;
    double zf = 0, gr = 0;
    for (const auto& f : files) {
        if (!suite.empty() && f.suite != suite) continue;
        ++s.files;
        s.tally += f.tally;
        zf += f.tally.zero_fraction_binary();
        gr += f.tally.gamma_rbn_ideal();
    }
    if (s.files) {
        s.mean_zero_fraction = zf / static_cast<double>(s.files);
        s.mean_gamma_rbn = gr / static_cast<double>(s.files);
    }
    return s;
}

CorpusReport analyze_corpus(const fs::path& root, std::size_t frame_bits) {
    if (!fs::is_directory(root)) throw IoError("corpus root is not a directory: " + root.string());
    std::vector<std::pair<std::string, fs::path>> inputs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) {
            for (const auto& f : fs::recursive_directory_iterator(entry.path())) {
                if (f.is_regular_file()) inputs.emplace_back(entry.path().filename().string(), f.path());
            }
        } else if (entry.is_regular_file()) {
            inputs.emplace_back(root.filename().string(), entry.path());
        }
    }
    std::sort(inputs.begin(), inputs.end());

    std::vector<std::future<FileRecord>> jobs;
    jobs.reserve(inputs.size());
    for (const auto& [suite, path] : inputs) {
        jobs.push_back(std::async(std::launch::async, [=] { return analyze_file(path, frame_bits, suite); }));
    }
    CorpusReport report;
    report.frame_bits = frame_bits;
    for (auto& j : jobs) report.files.push_back(j.get());

    std::vector<std::string> names;
    for (const auto& f : report.files) {
        if (std::find(names.begin(), names.end(), f.suite) == names.end()) names.push_back(f.suite);
    }
    for (const auto& name : names) report.suites.push_back(summarize(name, report.files));
    report.overall = summarize({}, report.files);
    report.overall.suite = "ALL";
    return report;
}

namespace {

void tally_csv(std::ostream& os, const SymbolTally& t) {
    os << t.bytes << ',' << t.frames << ',' << t.binary_bits << ',' << t.binary_zeros << ',' << t.rbn_symbols << ','
       << t.rbn_nonzeros << ',' << t.zero_fraction_binary() << ',' << t.nonzero_fraction_rbn() << ','
       << t.gamma_size_ideal() << ',' << t.gamma_rbn_ideal();
}

nlohmann::json tally_json(const SymbolTally& t) {
    return {{"bytes", t.bytes},
            {"frames", t.frames},
            {"binary_bits", t.binary_bits},
            {"binary_zeros", t.binary_zeros},
            {"rbn_symbols", t.rbn_symbols},
            {"rbn_nonzeros", t.rbn_nonzeros},
            {"zero_fraction_binary", t.zero_fraction_binary()},
            {"nonzero_fraction_rbn", t.nonzero_fraction_rbn()},
            {"gamma_size_ideal", t.gamma_size_ideal()},
            {"gamma_rbn_ideal", t.gamma_rbn_ideal()}};
}

}  // namespace

std::string CorpusReport::to_csv() const {
    std::ostringstream os;
    os << std::setprecision(6);
    os << "scope,suite,file,bytes,frames,binary_bits,binary_zeros,rbn_symbols,rbn_nonzeros,"
          "zero_fraction_binary,nonzero_fraction_rbn,gamma_size_ideal,gamma_rbn_ideal\n";
    for (const auto& f : files) {
        os << "file," << f.suite << ',' << f.file << ',';
        tally_csv(os, f.tally);
        os << '\n';
    }
    for (const auto& s : suites) {
        os << "suite," << s.suite << ",,";
        tally_csv(os, s.tally);
        os << '\n';
    }
    os << "overall,ALL,,";
    tally_csv(os, overall.tally);
    os << '\n';
    return os.str();
}

std::string CorpusReport::to_json() const {
    nlohmann::json j;
    j["frame_bits"] = frame_bits;
    for (const auto& f : files) j["files"].push_back({{"suite", f.suite}, {"file", f.file}, {"tally", tally_json(f.tally)}});
    auto suite_json = [](const SuiteRecord& s) {
        return nlohmann::json{{"suite", s.suite},
                              {"files", s.files},
                              {"weighted", tally_json(s.tally)},
                              {"mean_zero_fraction", s.mean_zero_fraction},
                              {"mean_gamma_rbn", s.mean_gamma_rbn}};
    };
    for (const auto& s : suites) j["suites"].push_back(suite_json(s));
    j["overall"] = suite_json(overall);
    return j.dump(2);
}

SweepReport frame_size_sweep(const std::vector<std::uint8_t>& data, const std::vector<std::size_t>& sizes) {
    SweepReport r;
    for (std::size_t bits : sizes) {
        const auto t = analyze_bytes(data, bits);
        r.points.push_back({bits, t.zero_fraction_binary(), t.gamma_rbn_ideal()});
    }
    for (std::size_t i = 1; i < r.points.size(); ++i) {
        if (r.points[i].gamma_rbn_ideal < r.points[i - 1].gamma_rbn_ideal) {
            r.non_decreasing = false;
            r.dips.push_back(r.points[i].frame_bits);
        }
    }
    return r;
}

SweepReport frame_size_sweep(const fs::path& path, const std::vector<std::size_t>& sizes) {
    return frame_size_sweep(read_file(path), sizes);
}

std::string SweepReport::to_csv() const {
    std::ostringstream os;
    os << std::setprecision(6) << "frame_bits,zero_fraction_binary,gamma_rbn_ideal\n";
    for (const auto& p : points) os << p.frame_bits << ',' << p.zero_fraction_binary << ',' << p.gamma_rbn_ideal << '\n';
    return os.str();
}

std::vector<DeviceSavings> device_report(const CorpusReport& report, const std::vector<DeviceProfile>& profiles) {
    std::vector<DeviceSavings> out;
    auto add = [&](const SuiteRecord& s) {
        for (const auto& p : profiles) {
            DeviceSavings d;
            d.device = p.name;
            d.suite = s.suite;
            d.gamma_size_ideal = s.tally.gamma_size_ideal();
            d.gamma_rbn_ideal = s.tally.gamma_rbn_ideal();
            d.gamma_sim_size = savings_vs_ebt(1.0 - s.tally.zero_fraction_binary(), p);
            d.gamma_sim_dev = savings_vs_ebt(s.tally.nonzero_fraction_rbn(), p);
            out.push_back(d);
        }
    };
    for (const auto& s : report.suites) add(s);
    add(report.overall);
    return out;
}

std::string device_report_csv(const std::vector<DeviceSavings>& rows) {
    std::ostringstream os;
    os << std::setprecision(6) << "device,suite,gamma_sim_size,gamma_sim_dev,gamma_size_ideal,gamma_rbn_ideal\n";
    for (const auto& r : rows) {
        os << r.device << ',' << r.suite << ',' << r.gamma_sim_size << ',' << r.gamma_sim_dev << ','
           << r.gamma_size_ideal << ',' << r.gamma_rbn_ideal << '\n';
    }
    return os.str();
}

}  // namespace rbnsize
