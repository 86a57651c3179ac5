#pragma once

// Benchmark harness: cut files into fixed-size frames, encode each frame
// independently, and measure how much transmit energy SiZe and RBN
// transmission would save over EbT.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rbnsize/energy_model.hpp"

namespace rbnsize {

inline constexpr std::size_t kDefaultFrameBits = 1024;

/// Symbol tallies for one file or an aggregate of files.
struct SymbolTally {
    std::uint64_t bytes = 0;
    std::uint64_t frames = 0;
    std::uint64_t binary_bits = 0;
    std::uint64_t binary_zeros = 0;
    std::uint64_t rbn_symbols = 0;   // includes one carry slot per frame
    std::uint64_t rbn_nonzeros = 0;

    SymbolTally& operator+=(const SymbolTally& o);

    double zero_fraction_binary() const noexcept;
    /// Non-zero RBN digits per binary bit, i.e. relative to the EbT frame.
    double nonzero_fraction_rbn() const noexcept;
    /// Savings over EbT with an ideal radio (I_low = 0).
    double gamma_size_ideal() const noexcept { return zero_fraction_binary(); }
    double gamma_rbn_ideal() const noexcept { return 1.0 - nonzero_fraction_rbn(); }
};

struct FileRecord {
    std::string file;
    std::string suite;
    SymbolTally tally;
};

struct SuiteRecord {
    std::string suite;
    std::size_t files = 0;
    SymbolTally tally;               // symbol-count weighted
    double mean_zero_fraction = 0;   // unweighted mean over files
    double mean_gamma_rbn = 0;       // unweighted mean over files
};

struct CorpusReport {
    std::size_t frame_bits = kDefaultFrameBits;
    std::vector<FileRecord> files;
    std::vector<SuiteRecord> suites;
    SuiteRecord overall;

    std::string to_csv() const;
    std::string to_json() const;
};

/// Tallies an in-memory buffer.
SymbolTally analyze_bytes(const std::vector<std::uint8_t>& data, std::size_t frame_bits = kDefaultFrameBits);

/// Throws IoError on I/O failure. The final partial frame is kept.
FileRecord analyze_file(const std::filesystem::path& path, std::size_t frame_bits = kDefaultFrameBits,
                        const std::string& suite = {});

/// `root` holds one sub-directory per suite; plain files directly in `root`
/// form a suite named after the directory. Files are processed in sorted
/// order, in parallel.
CorpusReport analyze_corpus(const std::filesystem::path& root, std::size_t frame_bits = kDefaultFrameBits);

SuiteRecord summarize(const std::string& suite, const std::vector<FileRecord>& files);

struct SweepPoint {
    std::size_t frame_bits = 0;
    double zero_fraction_binary = 0;
    double gamma_rbn_ideal = 0;
};

struct SweepReport {
    std::vector<SweepPoint> points;
    bool non_decreasing = true;        // gamma_rbn_ideal across increasing sizes
    std::vector<std::size_t> dips;     // frame sizes where savings fell vs the previous size

    std::string to_csv() const;
};

inline const std::vector<std::size_t> kDefaultSweepSizes = {8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096};

SweepReport frame_size_sweep(const std::vector<std::uint8_t>& data,
                             const std::vector<std::size_t>& sizes = kDefaultSweepSizes);
SweepReport frame_size_sweep(const std::filesystem::path& path,
                             const std::vector<std::size_t>& sizes = kDefaultSweepSizes);

struct DeviceSavings {
    std::string device;
    std::string suite;
    double gamma_sim_size = 0;
    double gamma_sim_dev = 0;
    double gamma_size_ideal = 0;
    double gamma_rbn_ideal = 0;
};

/// Prices each suite (and the overall aggregate) on each radio.
std::vector<DeviceSavings> device_report(const CorpusReport& report, const std::vector<DeviceProfile>& profiles);
std::string device_report_csv(const std::vector<DeviceSavings>& rows);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace rbnsize
