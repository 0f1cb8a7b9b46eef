#include "qmf/sigproc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fft.hpp"
#include "qmf/rng.hpp"
#include "qmf/stats.hpp"

namespace qmf {

std::string to_string(Window w) {
    return w == Window::Hann ? "hann" : "rectangular";
}

Window window_from_string(const std::string& s) {
    if (s == "hann") return Window::Hann;
    if (s == "rectangular" || s == "rect") return Window::Rectangular;
    throw std::invalid_argument("unknown window: " + s);
}

namespace {

std::vector<double> make_window(Window w, std::size_t m) {
    std::vector<double> win(m, 1.0);
    if (w == Window::Hann && m > 1) {
        for (std::size_t i = 0; i < m; ++i)
            win[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * i /
                                           static_cast<double>(m - 1)));
    }
    return win;
}

// Linear interpolation of a PSD onto an arbitrary frequency, clamped at the
// grid ends.
double interp_psd(const PsdEstimate& psd, double f) {
    const auto& fs = psd.frequencies;
    if (f <= fs.front()) return psd.power.front();
    if (f >= fs.back()) return psd.power.back();
    auto it = std::upper_bound(fs.begin(), fs.end(), f);
    std::size_t hi = static_cast<std::size_t>(it - fs.begin());
    std::size_t lo = hi - 1;
    double t = (f - fs[lo]) / (fs[hi] - fs[lo]);
    return psd.power[lo] + t * (psd.power[hi] - psd.power[lo]);
}

} // namespace

PsdEstimate welch_psd(const TimeSeries& ts, std::size_t segment_length,
                      Window window, double overlap) {
    validate(ts);
    if (segment_length < 2 || segment_length > ts.size())
        throw std::invalid_argument("welch_psd: bad segment length");
    if (!(overlap >= 0.0 && overlap < 1.0))
        throw std::invalid_argument("welch_psd: overlap must be in [0,1)");

    const std::size_t m = segment_length;
    const std::size_t step = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::lround(static_cast<double>(m) * (1.0 - overlap))));
    auto win = make_window(window, m);
    double win_power = 0.0;
    for (double w : win) win_power += w * w;

    const std::size_t bins = m / 2 + 1;
    std::vector<double> acc(bins, 0.0);
    std::size_t segments = 0;
    std::vector<double> seg(m);
    for (std::size_t start = 0; start + m <= ts.size(); start += step) {
        for (std::size_t i = 0; i < m; ++i)
            seg[i] = ts.samples[start + i] * win[i];
        auto spec = fft::rfft(seg);
        for (std::size_t k = 0; k < bins; ++k) acc[k] += std::norm(spec[k]);
        ++segments;
    }

    PsdEstimate psd;
    psd.segment_length = m;
    psd.window = window;
    psd.frequencies.resize(bins);
    psd.power.resize(bins);
    const double scale =
        1.0 / (ts.sample_rate * win_power * static_cast<double>(segments));
    for (std::size_t k = 0; k < bins; ++k) {
        psd.frequencies[k] =
            static_cast<double>(k) * ts.sample_rate / static_cast<double>(m);
        double one_sided = (k == 0 || (m % 2 == 0 && k == bins - 1)) ? 1.0 : 2.0;
        psd.power[k] = one_sided * scale * acc[k];
    }
    return psd;
}

TimeSeries lowpass_downsample(const TimeSeries& ts, double cutoff_hz,
                              double out_rate) {
    validate(ts);
    if (!(cutoff_hz > 0.0) || cutoff_hz >= ts.sample_rate / 2.0)
        throw std::invalid_argument("lowpass_downsample: cutoff outside band");
    if (!(out_rate > 0.0))
        throw std::invalid_argument("lowpass_downsample: bad output rate");
    double ratio = ts.sample_rate / out_rate;
    auto factor = static_cast<std::size_t>(std::lround(ratio));
    if (factor < 1 || std::abs(ratio - static_cast<double>(factor)) > 1e-9)
        throw std::invalid_argument(
            "lowpass_downsample: out_rate must divide sample_rate");
    if (cutoff_hz > out_rate / 2.0)
        throw std::invalid_argument(
            "lowpass_downsample: cutoff above output Nyquist");

    auto spec = fft::rfft(ts.samples);
    const std::size_t n = ts.size();
    for (std::size_t k = 0; k < spec.size(); ++k) {
        double f = static_cast<double>(k) * ts.sample_rate /
                   static_cast<double>(n);
        if (f > cutoff_hz) spec[k] = 0.0;
    }
    auto filtered = fft::irfft(spec, n);

    TimeSeries out;
    out.sample_rate = out_rate;
    out.epoch = ts.epoch;
    out.samples.reserve(n / factor + 1);
    for (std::size_t i = 0; i < n; i += factor)
        out.samples.push_back(filtered[i]);
    return out;
}

TimeSeries whiten(const TimeSeries& ts, const PsdEstimate& psd,
                  double taper_fraction) {
    validate(ts);
    if (psd.power.empty() || psd.frequencies.size() != psd.power.size())
        throw std::invalid_argument("whiten: malformed PSD");
    if (!(taper_fraction >= 0.0 && taper_fraction < 0.5))
        throw std::invalid_argument("whiten: taper fraction outside [0,0.5)");

    const std::size_t n = ts.size();
    std::vector<double> buf(ts.samples);
    const auto taper = static_cast<std::size_t>(
        std::floor(taper_fraction * static_cast<double>(n)));
    for (std::size_t i = 0; i < taper; ++i) {
        double w = 0.5 * (1.0 - std::cos(M_PI * (static_cast<double>(i) + 0.5) /
                                         static_cast<double>(taper)));
        buf[i] *= w;
        buf[n - 1 - i] *= w;
    }

    auto spec = fft::rfft(buf);
    const std::size_t bins = spec.size();
    std::vector<double> weight(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        double f = static_cast<double>(k) * ts.sample_rate /
                   static_cast<double>(n);
        double s = interp_psd(psd, f);
        if (!(s > 0.0))
            throw std::invalid_argument("whiten: nonpositive PSD bin in band");
        weight[k] = 1.0 / std::sqrt(s);
    }
    // Estimated PSDs are least reliable at the band edges.
    if (bins > 2) {
        weight[0] = weight[1];
        weight[bins - 1] = weight[bins - 2];
    }
    for (std::size_t k = 0; k < bins; ++k) spec[k] *= weight[k];

    auto out_samples = fft::irfft(spec, n);
    const double unit_variance_scale = std::sqrt(2.0 / ts.sample_rate);
    for (double& x : out_samples) x *= unit_variance_scale;

    TimeSeries out;
    out.samples = std::move(out_samples);
    out.sample_rate = ts.sample_rate;
    out.epoch = ts.epoch;
    return out;
}

TimeSeries synth_chirp(const ChirpSpec& spec, double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("synth_chirp: bad rate");
    if (!(spec.duration > 0.0))
        throw std::invalid_argument("synth_chirp: bad duration");
    if (!(spec.f_start > 0.0) || spec.f_end < spec.f_start ||
        spec.f_end >= rate / 2.0)
        throw std::invalid_argument("synth_chirp: sweep outside band");
    if (!(spec.taper_fraction >= 0.0 && spec.taper_fraction <= 0.5))
        throw std::invalid_argument("synth_chirp: bad taper fraction");

    const auto n = static_cast<std::size_t>(
        std::lround(spec.duration * rate));
    TimeSeries out;
    out.sample_rate = rate;
    out.samples.resize(std::max<std::size_t>(n, 1));
    const double slope = (spec.f_end - spec.f_start) / spec.duration;
    const auto taper = static_cast<std::size_t>(
        std::floor(spec.taper_fraction * static_cast<double>(out.samples.size())));
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        double t = static_cast<double>(i) / rate;
        double phase = 2.0 * M_PI * (spec.f_start * t + 0.5 * slope * t * t);
        double env = 1.0;
        if (i < taper)
            env = 0.5 * (1.0 - std::cos(M_PI * (static_cast<double>(i) + 0.5) /
                                        static_cast<double>(taper)));
        std::size_t from_end = out.samples.size() - 1 - i;
        if (from_end < taper)
            env = std::min(env, 0.5 * (1.0 - std::cos(M_PI *
                               (static_cast<double>(from_end) + 0.5) /
                               static_cast<double>(taper))));
        out.samples[i] = spec.amplitude * env * std::sin(phase);
    }
    return out;
}

TimeSeries synth_noise_white(std::size_t length, double rate, double sigma,
                             std::uint64_t seed) {
    if (length == 0) throw std::invalid_argument("synth_noise: empty length");
    if (!(rate > 0.0)) throw std::invalid_argument("synth_noise: bad rate");
    if (!(sigma >= 0.0)) throw std::invalid_argument("synth_noise: bad sigma");
    rng::SplitMix64 gen(seed);
    TimeSeries out;
    out.sample_rate = rate;
    out.samples.resize(length);
    for (double& x : out.samples) x = sigma * gen.gaussian();
    return out;
}

TimeSeries synth_noise_psd(const PsdEstimate& psd, std::size_t length,
                           double rate, std::uint64_t seed) {
    TimeSeries white = synth_noise_white(length, rate, 1.0, seed);
    auto spec = fft::rfft(white.samples);
    for (std::size_t k = 0; k < spec.size(); ++k) {
        double f = static_cast<double>(k) * rate / static_cast<double>(length);
        double s = std::max(interp_psd(psd, f), 0.0);
        spec[k] *= std::sqrt(s * rate / 2.0);
    }
    white.samples = fft::irfft(spec, length);
    return white;
}

TimeSeries inject(const TimeSeries& data, const TimeSeries& signal,
                  std::size_t at_index, double scale) {
    validate(data);
    validate(signal);
    if (data.sample_rate != signal.sample_rate)
        throw std::invalid_argument("inject: sample-rate mismatch");
    if (at_index >= data.size())
        throw std::invalid_argument("inject: index out of range");
    TimeSeries out = data;
    for (std::size_t i = 0; i < signal.size() && at_index + i < out.size(); ++i)
        out.samples[at_index + i] += scale * signal.samples[i];
    return out;
}

} // namespace qmf
