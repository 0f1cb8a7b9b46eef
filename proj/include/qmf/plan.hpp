#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace qmf {

// How a long filtering job is cut into small encodable pieces: data segments
// of length k_d processed at stride k_d - k_t + 1, and the template split
// into non-overlapping chunks of length k_t (last chunk zero-padded).
struct SegmentPlan {
    std::size_t k_d = 0;
    std::size_t k_t = 0;
    std::size_t data_len = 0;     // L
    std::size_t template_len = 0; // N
    std::vector<std::size_t> data_starts; // base starts (chunk offset 0)
    std::size_t lags_per_segment = 0;     // k_d - k_t + 1
    std::size_t num_chunks = 0;           // ceil(N / k_t)
    std::uint64_t shots_per_segment = 0;
    std::optional<double> k_star; // stationary point of the cost model, when auto
};

// Per-segment amortized sampling cost k (ln k)^2 / (k - N); defined for k > N.
double segment_cost(double k, double n);

// Stationary point of the cost model: the k solving N = 2k / (ln k + 2).
double optimal_k_real(double n);

// Integer segment length minimizing segment_cost near the stationary point
// (always >= N + 1).
std::size_t auto_k(std::size_t n);

// Build the plan. k_d = nullopt picks auto_k(N) rounded up to the next power
// of two (avoids wasted zero-probability padding in the loader). Trailing
// segments are clamped to end at L; duplicate lags are dropped downstream,
// first occurrence wins.
SegmentPlan plan_segments(std::size_t data_len, std::size_t template_len,
                          std::optional<std::size_t> k_d, std::size_t k_t,
                          std::uint64_t shots_per_segment);

} // namespace qmf
