#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmf/time_series.hpp"

namespace qmf {

// A slice shifted into nonnegative values, normalized into a probability
// vector and zero-padded to a power of two, ready for amplitude loading.
//
// probs[i] = (raw[i] + offset) / norm for i < raw.size(), 0 for padding.
struct EncodedSegment {
    std::vector<double> raw;
    double offset = 0.0; // shift applied to make every value nonnegative
    double norm = 0.0;   // sum of shifted values, > 0
    std::vector<double> probs;
    std::size_t padded_len = 0;
};

// Shift by -min(values) + margin, normalize, pad to the next power of two.
// Throws on non-finite input or when the shifted values sum to zero
// (constant input with margin 0).
EncodedSegment preprocess(std::span<const double> values, double margin);

struct SnrEstimate {
    std::size_t lag = 0;
    double value = 0.0;
    std::optional<double> sigma; // predicted standard error; absent for oracle
};

enum class Provenance { Oracle, HybridIdeal, HybridSim, HybridNoisy };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct SnrSeries {
    std::vector<SnrEstimate> estimates; // ordered, lags contiguous from 0
    Provenance provenance = Provenance::Oracle;
    std::uint64_t shots = 0; // total shot budget, 0 when not applicable
    std::uint64_t seed = 0;
};

// Classical time-domain reference: value[j] = sum_i data[j+i] * template[i]
// for j in 0..L-N. Compensated summation throughout.
SnrSeries oracle_snr(const TimeSeries& tmpl, const TimeSeries& data);

// Offset-correction total at one lag:
//   sum_i (dy*x_i + dx*y_{lag+i} + dy*dx)
// over template indices whose data index exists. Template entries that pair
// with a missing data sample must be exact zeros (trailing chunk padding);
// anything else is a lag out of range.
double correction_total(const EncodedSegment& tmpl, const EncodedSegment& data,
                        std::size_t lag);

// Undo the positivity shift: norm_y * norm_x * joint_prob_sum minus the
// correction total. Exact when joint_prob_sum is the exact product
// probability mass at this lag.
double corrected_snr(double joint_prob_sum, const EncodedSegment& tmpl,
                     const EncodedSegment& data, std::size_t lag);

// Predicted absolute standard errors per lag from the binomial variance of
// the shifted (nonnegative) estimator. `values` are per-lag SNRs, `corrections`
// the per-lag correction totals; shifted values are their sums. shots_per_lag
// is the total shot count divided by the number of lags.
std::vector<double> predict_precision(std::span<const double> values,
                                      double shots_per_lag,
                                      std::span<const double> corrections);

} // namespace qmf
