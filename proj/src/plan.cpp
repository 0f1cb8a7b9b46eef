#include "qmf/plan.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace qmf {

double segment_cost(double k, double n) {
    if (!(k > n))
        throw std::invalid_argument("segment_cost: requires k > N");
    double lk = std::log(k);
    return k * lk * lk / (k - n);
}

double optimal_k_real(double n) {
    if (!(n >= 1.0))
        throw std::invalid_argument("optimal_k_real: N must be >= 1");
    // Fixed point of k = N (ln k + 2) / 2, monotone and contracting for the
    // sizes of interest; a few dozen iterations give full precision.
    double k = std::max(2.0 * n, n + 1.5);
    for (int i = 0; i < 200; ++i) {
        double next = n * (std::log(k) + 2.0) / 2.0;
        if (std::abs(next - k) < 1e-14 * k) {
            k = next;
            break;
        }
        k = next;
    }
    return k;
}

std::size_t auto_k(std::size_t n) {
    double root = optimal_k_real(static_cast<double>(n));
    auto lo = static_cast<std::size_t>(std::floor(root));
    std::size_t hi = lo + 1;
    if (lo < n + 1) lo = n + 1;
    if (hi < n + 1) hi = n + 1;
    double dn = static_cast<double>(n);
    return segment_cost(static_cast<double>(lo), dn) <=
                   segment_cost(static_cast<double>(hi), dn)
               ? lo
               : hi;
}

SegmentPlan plan_segments(std::size_t data_len, std::size_t template_len,
                          std::optional<std::size_t> k_d, std::size_t k_t,
                          std::uint64_t shots_per_segment) {
    if (data_len == 0)
        throw std::invalid_argument("plan_segments: empty data");
    if (template_len == 0 || template_len > data_len)
        throw std::invalid_argument("plan_segments: invalid template length");
    if (k_t == 0 || k_t > template_len)
        throw std::invalid_argument("plan_segments: invalid chunk length");
    if (shots_per_segment == 0)
        throw std::invalid_argument("plan_segments: shots must be > 0");

    SegmentPlan plan;
    plan.k_t = k_t;
    plan.data_len = data_len;
    plan.template_len = template_len;
    plan.shots_per_segment = shots_per_segment;

    if (k_d) {
        plan.k_d = *k_d;
    } else {
        std::size_t k = auto_k(template_len);
        plan.k_star = optimal_k_real(static_cast<double>(template_len));
        plan.k_d = std::bit_ceil(k);
    }
    if (plan.k_d < k_t || plan.k_d > data_len)
        throw std::invalid_argument("plan_segments: infeasible segment length");

    plan.lags_per_segment = plan.k_d - k_t + 1;
    plan.num_chunks = (template_len + k_t - 1) / k_t;

    const std::size_t max_lag = data_len - template_len; // inclusive
    const std::size_t stride = plan.lags_per_segment;
    for (std::size_t start = 0;; start += stride) {
        plan.data_starts.push_back(start);
        if (start + plan.k_d - k_t >= max_lag) break;
    }
    return plan;
}

} // namespace qmf
