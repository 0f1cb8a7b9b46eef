#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qmf/core.hpp"
#include "qmf/sigproc.hpp"
#include "qmf/simulator.hpp"
#include "qmf/time_series.hpp"

namespace qmf::io {

// Ordered key=value pairs emitted as `# key=value` comment lines ahead of the
// CSV header; every output file carries the configuration that produced it.
using Provenance = std::vector<std::pair<std::string, std::string>>;

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Writes via a temporary file and an atomic rename; no partial output is left
// behind on error.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

std::string read_file(const std::filesystem::path& path);

// `index,time_s,value` rows; sample_rate and epoch ride in the header.
std::string format_time_series(const TimeSeries& ts, const Provenance& meta = {});
TimeSeries parse_time_series(const std::string& text);

// `lag,time_s,snr,sigma` rows; sigma blank when absent.
std::string format_snr_series(const SnrSeries& series, double sample_rate,
                              double epoch, const Provenance& meta = {});
SnrSeries parse_snr_series(const std::string& text);

// `freq_hz,power` rows.
std::string format_psd(const PsdEstimate& psd, const Provenance& meta = {});
PsdEstimate parse_psd(const std::string& text);

// `bitstring,count` rows under a `# shots=<total>` header.
std::string format_histogram(const ShotHistogram& hist,
                             const Provenance& meta = {});
ShotHistogram parse_histogram(const std::string& text);

void write_time_series(const std::filesystem::path& path, const TimeSeries& ts,
                       const Provenance& meta = {});
TimeSeries read_time_series(const std::filesystem::path& path);

void write_snr_series(const std::filesystem::path& path,
                      const SnrSeries& series, double sample_rate, double epoch,
                      const Provenance& meta = {});
SnrSeries read_snr_series(const std::filesystem::path& path);

void write_psd(const std::filesystem::path& path, const PsdEstimate& psd,
               const Provenance& meta = {});
PsdEstimate read_psd(const std::filesystem::path& path);

} // namespace qmf::io
