#include "qmf/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace qmf::io {

namespace {

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void emit_meta(std::ostringstream& out, const Provenance& meta) {
    for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
}

// Comment lines (`# key=value`) and data rows of a CSV body.
struct ParsedCsv {
    std::map<std::string, std::string> meta;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header;
};

ParsedCsv parse_csv(const std::string& text) {
    ParsedCsv out;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t start = line.find_first_not_of(" \t", 1);
            if (start == std::string::npos) continue;
            std::size_t eq = line.find('=', start);
            if (eq != std::string::npos)
                out.meta[line.substr(start, eq - start)] = line.substr(eq + 1);
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (ls.eof() && !line.empty() && line.back() == ',')
            fields.emplace_back();
        if (!have_header) {
            out.header = fields;
            have_header = true;
        } else {
            out.rows.push_back(std::move(fields));
        }
    }
    return out;
}

double to_double(const std::string& s) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("bad numeric field: '" + s + "'");
    }
}

} // namespace

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw DataError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw DataError("rename failed: " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_time_series(const TimeSeries& ts, const Provenance& meta) {
    std::ostringstream out;
    emit_meta(out, meta);
    out << "# sample_rate=" << fmt(ts.sample_rate) << "\n";
    out << "# epoch=" << fmt(ts.epoch) << "\n";
    out << "index,time_s,value\n";
    for (std::size_t i = 0; i < ts.size(); ++i)
        out << i << "," << fmt(ts.time_at(i)) << "," << fmt(ts.samples[i])
            << "\n";
    return out.str();
}

TimeSeries parse_time_series(const std::string& text) {
    ParsedCsv csv = parse_csv(text);
    TimeSeries ts;
    if (auto it = csv.meta.find("sample_rate"); it != csv.meta.end())
        ts.sample_rate = to_double(it->second);
    else
        throw DataError("time series: missing sample_rate header");
    if (auto it = csv.meta.find("epoch"); it != csv.meta.end())
        ts.epoch = to_double(it->second);
    for (const auto& row : csv.rows) {
        if (row.size() < 3) throw DataError("time series: short row");
        ts.samples.push_back(to_double(row[2]));
    }
    if (ts.samples.empty()) throw DataError("time series: no samples");
    return ts;
}

std::string format_snr_series(const SnrSeries& series, double sample_rate,
                              double epoch, const Provenance& meta) {
    std::ostringstream out;
    emit_meta(out, meta);
    out << "# provenance=" << to_string(series.provenance) << "\n";
    out << "# shots=" << series.shots << "\n";
    out << "# seed=" << series.seed << "\n";
    out << "# sample_rate=" << fmt(sample_rate) << "\n";
    out << "# epoch=" << fmt(epoch) << "\n";
    out << "lag,time_s,snr,sigma\n";
    for (const auto& est : series.estimates) {
        double t = epoch + static_cast<double>(est.lag) / sample_rate;
        out << est.lag << "," << fmt(t) << "," << fmt(est.value) << ",";
        if (est.sigma) out << fmt(*est.sigma);
        out << "\n";
    }
    return out.str();
}

SnrSeries parse_snr_series(const std::string& text) {
    ParsedCsv csv = parse_csv(text);
    SnrSeries series;
    if (auto it = csv.meta.find("provenance"); it != csv.meta.end())
        series.provenance = provenance_from_string(it->second);
    if (auto it = csv.meta.find("shots"); it != csv.meta.end())
        series.shots = static_cast<std::uint64_t>(to_double(it->second));
    if (auto it = csv.meta.find("seed"); it != csv.meta.end())
        series.seed = static_cast<std::uint64_t>(to_double(it->second));
    for (const auto& row : csv.rows) {
        if (row.size() < 3) throw DataError("snr series: short row");
        SnrEstimate est;
        est.lag = static_cast<std::size_t>(to_double(row[0]));
        est.value = to_double(row[2]);
        if (row.size() >= 4 && !row[3].empty()) est.sigma = to_double(row[3]);
        series.estimates.push_back(est);
    }
    if (series.estimates.empty()) throw DataError("snr series: no rows");
    return series;
}

std::string format_psd(const PsdEstimate& psd, const Provenance& meta) {
    std::ostringstream out;
    emit_meta(out, meta);
    out << "# segment_length=" << psd.segment_length << "\n";
    out << "# window=" << to_string(psd.window) << "\n";
    out << "freq_hz,power\n";
    for (std::size_t k = 0; k < psd.frequencies.size(); ++k)
        out << fmt(psd.frequencies[k]) << "," << fmt(psd.power[k]) << "\n";
    return out.str();
}

PsdEstimate parse_psd(const std::string& text) {
    ParsedCsv csv = parse_csv(text);
    PsdEstimate psd;
    if (auto it = csv.meta.find("segment_length"); it != csv.meta.end())
        psd.segment_length = static_cast<std::size_t>(to_double(it->second));
    if (auto it = csv.meta.find("window"); it != csv.meta.end())
        psd.window = window_from_string(it->second);
    for (const auto& row : csv.rows) {
        if (row.size() < 2) throw DataError("psd: short row");
        psd.frequencies.push_back(to_double(row[0]));
        psd.power.push_back(to_double(row[1]));
    }
    if (psd.power.empty()) throw DataError("psd: no rows");
    return psd;
}

std::string format_histogram(const ShotHistogram& hist,
                             const Provenance& meta) {
    std::ostringstream out;
    emit_meta(out, meta);
    out << "# shots=" << hist.total_shots << "\n";
    out << "bitstring,count\n";
    for (const auto& [key, count] : hist.counts) {
        std::string bits(static_cast<std::size_t>(hist.num_bits), '0');
        for (int b = 0; b < hist.num_bits; ++b)
            if ((key >> (hist.num_bits - 1 - b)) & 1) bits[b] = '1';
        out << bits << "," << count << "\n";
    }
    return out.str();
}

ShotHistogram parse_histogram(const std::string& text) {
    ParsedCsv csv = parse_csv(text);
    ShotHistogram hist;
    if (auto it = csv.meta.find("shots"); it != csv.meta.end())
        hist.total_shots = static_cast<std::uint64_t>(to_double(it->second));
    else
        throw DataError("histogram: missing shots header");
    for (const auto& row : csv.rows) {
        if (row.size() < 2) throw DataError("histogram: short row");
        const std::string& bits = row[0];
        std::uint64_t key = 0;
        for (char c : bits) {
            if (c != '0' && c != '1')
                throw DataError("histogram: bad bitstring: " + bits);
            key = (key << 1) | static_cast<std::uint64_t>(c - '0');
        }
        hist.num_bits = static_cast<int>(bits.size());
        hist.counts[key] += static_cast<std::uint64_t>(to_double(row[1]));
    }
    return hist;
}

void write_time_series(const std::filesystem::path& path, const TimeSeries& ts,
                       const Provenance& meta) {
    write_file_atomic(path, format_time_series(ts, meta));
}

TimeSeries read_time_series(const std::filesystem::path& path) {
    return parse_time_series(read_file(path));
}

void write_snr_series(const std::filesystem::path& path,
                      const SnrSeries& series, double sample_rate, double epoch,
                      const Provenance& meta) {
    write_file_atomic(path, format_snr_series(series, sample_rate, epoch, meta));
}

SnrSeries read_snr_series(const std::filesystem::path& path) {
    return parse_snr_series(read_file(path));
}

void write_psd(const std::filesystem::path& path, const PsdEstimate& psd,
               const Provenance& meta) {
    write_file_atomic(path, format_psd(psd, meta));
}

PsdEstimate read_psd(const std::filesystem::path& path) {
    return parse_psd(read_file(path));
}

} // namespace qmf::io
