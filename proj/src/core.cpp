#include "qmf/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "qmf/stats.hpp"

namespace qmf {

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::Oracle: return "oracle";
        case Provenance::HybridIdeal: return "hybrid-ideal";
        case Provenance::HybridSim: return "hybrid-sim";
        case Provenance::HybridNoisy: return "hybrid-noisy";
    }
    return "unknown";
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "oracle") return Provenance::Oracle;
    if (s == "hybrid-ideal") return Provenance::HybridIdeal;
    if (s == "hybrid-sim") return Provenance::HybridSim;
    if (s == "hybrid-noisy") return Provenance::HybridNoisy;
    throw std::invalid_argument("unknown provenance: " + s);
}

EncodedSegment preprocess(std::span<const double> values, double margin) {
    if (values.empty())
        throw std::invalid_argument("preprocess: empty input");
    if (!(margin >= 0.0))
        throw std::invalid_argument("preprocess: margin must be >= 0");
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("preprocess: non-finite input");

    EncodedSegment seg;
    seg.raw.assign(values.begin(), values.end());
    double lo = *std::min_element(values.begin(), values.end());
    seg.offset = -lo + margin;

    KahanSum total;
    for (double v : values) total.add(v + seg.offset);
    seg.norm = total.value();
    if (!(seg.norm > 0.0))
        throw std::invalid_argument("preprocess: zero norm (constant input with margin 0)");

    seg.padded_len = std::bit_ceil(values.size());
    seg.probs.assign(seg.padded_len, 0.0);
    for (std::size_t i = 0; i < values.size(); ++i)
        seg.probs[i] = (values[i] + seg.offset) / seg.norm;
    return seg;
}

SnrSeries oracle_snr(const TimeSeries& tmpl, const TimeSeries& data) {
    validate(tmpl);
    validate(data);
    const std::size_t n = tmpl.size();
    const std::size_t len = data.size();
    if (n > len)
        throw std::invalid_argument("oracle_snr: template longer than data");
    if (tmpl.sample_rate != data.sample_rate)
        throw std::invalid_argument("oracle_snr: sample-rate mismatch");

    SnrSeries out;
    out.provenance = Provenance::Oracle;
    out.estimates.reserve(len - n + 1);
    for (std::size_t j = 0; j + n <= len; ++j) {
        KahanSum acc;
        for (std::size_t i = 0; i < n; ++i)
            acc.add(data.samples[j + i] * tmpl.samples[i]);
        out.estimates.push_back({j, acc.value(), std::nullopt});
    }
    return out;
}

double correction_total(const EncodedSegment& tmpl, const EncodedSegment& data,
                        std::size_t lag) {
    if (lag >= data.raw.size())
        throw std::invalid_argument("correction_total: lag out of range");
    const double dx = tmpl.offset;
    const double dy = data.offset;
    KahanSum acc;
    for (std::size_t i = 0; i < tmpl.raw.size(); ++i) {
        if (lag + i < data.raw.size()) {
            acc.add(dy * tmpl.raw[i]);
            acc.add(dx * data.raw[lag + i]);
            acc.add(dy * dx);
        } else if (tmpl.raw[i] != 0.0) {
            throw std::invalid_argument("correction_total: lag out of range");
        }
    }
    return acc.value();
}

double corrected_snr(double joint_prob_sum, const EncodedSegment& tmpl,
                     const EncodedSegment& data, std::size_t lag) {
    if (!(joint_prob_sum >= 0.0 && joint_prob_sum <= 1.0 + 1e-12))
        throw std::invalid_argument("corrected_snr: joint_prob_sum outside [0,1]");
    return data.norm * tmpl.norm * joint_prob_sum -
           correction_total(tmpl, data, lag);
}

std::vector<double> predict_precision(std::span<const double> values,
                                      double shots_per_lag,
                                      std::span<const double> corrections) {
    if (!(shots_per_lag > 0.0))
        throw std::invalid_argument("predict_precision: nonpositive shot count");
    if (values.size() != corrections.size())
        throw std::invalid_argument("predict_precision: length mismatch");
    const std::size_t lags = values.size();

    // Binomial statistics apply to the shifted estimator, whose per-lag
    // expectations are the nonnegative values[j] + corrections[j].
    std::vector<double> shifted(lags);
    KahanSum total;
    for (std::size_t j = 0; j < lags; ++j) {
        shifted[j] = std::max(values[j] + corrections[j], 0.0);
        total.add(shifted[j]);
    }
    const double total_shots = shots_per_lag * static_cast<double>(lags);
    std::vector<double> sigma(lags);
    for (std::size_t j = 0; j < lags; ++j) {
        double rest = std::max(total.value() - shifted[j], 0.0);
        sigma[j] = std::sqrt(shifted[j] * rest / total_shots);
    }
    return sigma;
}

} // namespace qmf
