#include "qmf/hybrid.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "qmf/encoding.hpp"
#include "qmf/rng.hpp"
#include "qmf/stats.hpp"

namespace qmf {

RelocationResult relocate(const ShotHistogram& hist,
                          const RelocationRule& rule) {
    if (hist.num_bits != rule.t_bits + rule.d_bits)
        throw std::invalid_argument("relocate: bitstring length mismatch");

    RelocationResult res;
    res.counts.assign(rule.max_lag + 1, 0);
    res.total_shots = hist.total_shots;
    const std::uint64_t d_mask = (std::uint64_t{1} << rule.d_bits) - 1;
    for (const auto& [key, count] : hist.counts) {
        std::uint64_t b = key >> rule.d_bits;
        std::uint64_t d = key & d_mask;
        if (b < rule.k_t && d < rule.d_len && d >= b &&
            d - b <= rule.max_lag) {
            res.counts[d - b] += count;
            res.kept += count;
        } else {
            res.discarded += count;
        }
    }
    res.joint_prob_sums.resize(res.counts.size());
    for (std::size_t j = 0; j < res.counts.size(); ++j)
        res.joint_prob_sums[j] = static_cast<double>(res.counts[j]) /
                                 static_cast<double>(hist.total_shots);
    return res;
}

namespace {

struct RunResult {
    // Per local lag: global lag, SNR contribution, variance contribution.
    std::vector<std::size_t> lags;
    std::vector<double> values;
    std::vector<double> variances;
};

struct RunSpec {
    std::size_t chunk = 0;     // chunk index m
    std::size_t seg = 0;       // index into plan.data_starts
    std::size_t data_start = 0;
    std::size_t data_len = 0;  // raw slice length (trailing clamp)
};

} // namespace

SnrSeries estimate_snr(const TimeSeries& tmpl, const TimeSeries& data,
                       const SegmentPlan& plan, const HybridOptions& opts) {
    validate(tmpl);
    validate(data);
    const std::size_t n = tmpl.size();
    const std::size_t len = data.size();
    if (tmpl.sample_rate != data.sample_rate)
        throw std::invalid_argument("estimate_snr: sample-rate mismatch");
    if (plan.template_len != n || plan.data_len != len)
        throw std::invalid_argument("estimate_snr: plan does not match inputs");
    const std::size_t lags = len - n + 1;
    const std::size_t k_t = plan.k_t;
    const std::size_t k_d = plan.k_d;

    // Enumerate independent runs. Chunk m's segments sit at the base starts
    // shifted by the chunk offset; trailing slices are clamped to end at L.
    std::vector<RunSpec> runs;
    for (std::size_t m = 0; m < plan.num_chunks; ++m) {
        const std::size_t offset = m * k_t;
        for (std::size_t t = 0; t < plan.data_starts.size(); ++t) {
            RunSpec spec;
            spec.chunk = m;
            spec.seg = t;
            spec.data_start = plan.data_starts[t] + offset;
            spec.data_len = std::min(k_d, len - spec.data_start);
            runs.push_back(spec);
        }
    }

    std::vector<RunResult> results(runs.size());

    auto process = [&](std::size_t run_index) {
        const RunSpec& spec = runs[run_index];
        const std::size_t offset = spec.chunk * k_t;
        const std::size_t true_chunk_len = std::min(k_t, n - offset);

        std::vector<double> chunk_raw(k_t, 0.0);
        for (std::size_t i = 0; i < true_chunk_len; ++i)
            chunk_raw[i] = tmpl.samples[offset + i];
        EncodedSegment tmpl_seg = preprocess(chunk_raw, opts.margin);

        std::span<const double> slice(data.samples.data() + spec.data_start,
                                      spec.data_len);
        EncodedSegment data_seg = preprocess(slice, opts.margin);

        RelocationRule rule;
        rule.k_t = k_t;
        rule.d_len = spec.data_len;
        rule.max_lag = k_d - k_t;
        rule.t_bits = std::countr_zero(tmpl_seg.padded_len);
        rule.d_bits = std::countr_zero(data_seg.padded_len);

        std::vector<double> prob_sums(rule.max_lag + 1, 0.0);
        std::vector<double> variances(rule.max_lag + 1, 0.0);
        const double nn = tmpl_seg.norm * data_seg.norm;

        if (opts.exact) {
            for (std::size_t l = 0; l <= rule.max_lag; ++l) {
                KahanSum acc;
                for (std::size_t b = 0; b < k_t; ++b)
                    if (l + b < data_seg.padded_len)
                        acc.add(tmpl_seg.probs[b] * data_seg.probs[l + b]);
                prob_sums[l] = acc.value();
            }
        } else {
            const std::uint64_t shots = plan.shots_per_segment;
            const std::uint64_t stream =
                rng::derive_stream(opts.seed, spec.seg, spec.chunk);
            ShotHistogram hist;
            switch (opts.backend) {
                case Backend::Ideal:
                    hist = sample_ideal(tmpl_seg, data_seg, shots, stream);
                    break;
                case Backend::Statevector:
                case Backend::Noisy: {
                    CircuitDescription data_circ =
                        build_loader(angle_tree(data_seg));
                    CircuitDescription joint;
                    if (tmpl_seg.padded_len >= 2) {
                        CircuitDescription tmpl_circ =
                            build_loader(angle_tree(tmpl_seg));
                        joint = join_circuits(tmpl_circ, data_circ);
                    } else {
                        joint = data_circ;
                    }
                    ShotHistogram full =
                        opts.backend == Backend::Statevector
                            ? sample(simulate(joint), shots, stream)
                            : apply_noise(joint, opts.noise, shots, stream);
                    hist = marginalize(full, joint.output_register);
                    break;
                }
            }
            RelocationResult rel = relocate(hist, rule);
            prob_sums = rel.joint_prob_sums;
            for (std::size_t l = 0; l <= rule.max_lag; ++l) {
                double p = prob_sums[l];
                variances[l] =
                    nn * nn * p * (1.0 - p) / static_cast<double>(shots);
            }
        }

        RunResult& res = results[run_index];
        const std::size_t base = plan.data_starts[spec.seg];
        for (std::size_t l = 0; l <= rule.max_lag; ++l) {
            const std::size_t j = base + l;
            if (j >= lags) continue;
            // Real template samples must see real data; guaranteed for every
            // in-range lag by the clamping rule.
            res.lags.push_back(j);
            res.values.push_back(
                corrected_snr(std::min(prob_sums[l], 1.0), tmpl_seg, data_seg, l));
            res.variances.push_back(variances[l]);
        }
    };

    const int threads = std::max(1, opts.threads);
    if (threads == 1 || runs.size() < 2) {
        for (std::size_t r = 0; r < runs.size(); ++r) process(r);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> cursor{0};
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t r = cursor.fetch_add(1);
                    if (r >= runs.size()) return;
                    process(r);
                }
            });
        for (auto& th : pool) th.join();
    }

    // Deterministic reduction in run order; first occurrence of a lag within
    // each chunk wins, duplicates from clamped trailing segments are dropped.
    std::vector<KahanSum> values(lags);
    std::vector<KahanSum> variances(lags);
    std::vector<char> seen(lags, 0);
    std::size_t current_chunk = static_cast<std::size_t>(-1);
    for (std::size_t r = 0; r < runs.size(); ++r) {
        if (runs[r].chunk != current_chunk) {
            current_chunk = runs[r].chunk;
            std::fill(seen.begin(), seen.end(), 0);
        }
        const RunResult& res = results[r];
        for (std::size_t i = 0; i < res.lags.size(); ++i) {
            const std::size_t j = res.lags[i];
            if (seen[j]) continue;
            seen[j] = 1;
            values[j].add(res.values[i]);
            variances[j].add(res.variances[i]);
        }
    }

    SnrSeries out;
    out.provenance = opts.exact                        ? Provenance::HybridIdeal
                     : opts.backend == Backend::Ideal  ? Provenance::HybridIdeal
                     : opts.backend == Backend::Noisy  ? Provenance::HybridNoisy
                                                       : Provenance::HybridSim;
    out.seed = opts.seed;
    out.shots = opts.exact ? 0
                           : plan.shots_per_segment * runs.size();
    out.estimates.reserve(lags);
    for (std::size_t j = 0; j < lags; ++j)
        out.estimates.push_back(
            {j, values[j].value(), std::sqrt(variances[j].value())});
    return out;
}

ComparisonReport compare_runs(const SnrSeries& estimates,
                              const SnrSeries& truth) {
    if (estimates.estimates.size() != truth.estimates.size())
        throw std::invalid_argument("compare_runs: length mismatch");
    const std::size_t lags = truth.estimates.size();
    std::vector<double> est(lags), tru(lags);
    ComparisonReport rep;
    rep.errors.resize(lags);
    rep.z_scores.resize(lags);
    for (std::size_t j = 0; j < lags; ++j) {
        est[j] = estimates.estimates[j].value;
        tru[j] = truth.estimates[j].value;
        rep.errors[j] = est[j] - tru[j];
        rep.max_abs_error = std::max(rep.max_abs_error, std::abs(rep.errors[j]));
        auto sigma = estimates.estimates[j].sigma;
        rep.z_scores[j] = (sigma && *sigma > 0.0) ? rep.errors[j] / *sigma
                                                  : std::nan("");
    }
    rep.value_correlation = pearson(est, tru);
    double ec = pearson(rep.errors, tru);
    if (std::isnan(ec)) {
        rep.error_correlation_defined = false;
        rep.error_truth_correlation = 0.0;
    } else {
        rep.error_truth_correlation = ec;
    }
    return rep;
}

} // namespace qmf
