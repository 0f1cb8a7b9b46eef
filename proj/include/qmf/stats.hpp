#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace qmf {

// Kahan compensated accumulator. Long convolutions and correction sums can
// reach 1e5 terms; plain summation loses digits the exactness checks need.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }

    double value() const { return sum; }
};

inline double mean(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("mean: empty input");
    KahanSum s;
    for (double x : v) s.add(x);
    return s.value() / static_cast<double>(v.size());
}

inline double variance(std::span<const double> v) {
    if (v.size() < 2) throw std::invalid_argument("variance: need >= 2 samples");
    double m = mean(v);
    KahanSum s;
    for (double x : v) s.add((x - m) * (x - m));
    return s.value() / static_cast<double>(v.size() - 1);
}

// Pearson correlation; throws on length mismatch, returns NaN for a
// zero-variance input (callers decide how to report that).
inline double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("pearson: length mismatch");
    if (a.size() < 2) throw std::invalid_argument("pearson: need >= 2 samples");
    double ma = mean(a), mb = mean(b);
    KahanSum sab, saa, sbb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab.add((a[i] - ma) * (b[i] - mb));
        saa.add((a[i] - ma) * (a[i] - ma));
        sbb.add((b[i] - mb) * (b[i] - mb));
    }
    double denom = std::sqrt(saa.value() * sbb.value());
    if (denom == 0.0) return std::nan("");
    return sab.value() / denom;
}

} // namespace qmf
