#pragma once

#include <cstdint>
#include <vector>

#include "qmf/core.hpp"
#include "qmf/plan.hpp"
#include "qmf/simulator.hpp"
#include "qmf/time_series.hpp"

namespace qmf {

// Classical decoder: maps a joint outcome (template index b, data index d)
// to lag j = d - b, or discards it. Keys are (b << d_bits) | d.
struct RelocationRule {
    std::size_t k_t = 0;     // kept template indices: b < k_t
    std::size_t d_len = 0;   // kept data indices: d < d_len
    std::size_t max_lag = 0; // kept lags: 0 <= d - b <= max_lag
    int t_bits = 0;
    int d_bits = 0;
};

struct RelocationResult {
    std::vector<std::uint64_t> counts;     // per lag 0..max_lag
    std::vector<double> joint_prob_sums;   // counts / total_shots
    std::uint64_t kept = 0;
    std::uint64_t discarded = 0;
    std::uint64_t total_shots = 0;
};

RelocationResult relocate(const ShotHistogram& hist,
                          const RelocationRule& rule);

enum class Backend { Ideal, Statevector, Noisy };

struct HybridOptions {
    Backend backend = Backend::Ideal;
    NoiseModel noise;      // used by Backend::Noisy
    double margin = 0.0;
    std::uint64_t seed = 0;
    bool exact = false;    // infinite-shot switch: exact joint probabilities
    int threads = 1;       // independent runs processed in parallel
};

// End-to-end estimator: per (data segment, template chunk) run, encode,
// sample (or take exact probabilities), relocate, correct, then stitch chunk
// partials into the full per-lag series with predicted standard errors.
// Deterministic for a fixed seed regardless of thread count.
SnrSeries estimate_snr(const TimeSeries& tmpl, const TimeSeries& data,
                       const SegmentPlan& plan, const HybridOptions& opts);

struct ComparisonReport {
    double value_correlation = 0.0;
    double error_truth_correlation = 0.0;
    bool error_correlation_defined = true; // false when errors are degenerate
    double max_abs_error = 0.0;
    std::vector<double> errors;
    std::vector<double> z_scores; // error / sigma, NaN where sigma absent/zero
};

ComparisonReport compare_runs(const SnrSeries& estimates,
                              const SnrSeries& truth);

} // namespace qmf
