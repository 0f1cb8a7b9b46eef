#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmf/time_series.hpp"

namespace qmf {

enum class Window { Hann, Rectangular };

std::string to_string(Window w);
Window window_from_string(const std::string& s);

// One-sided PSD on a uniform grid from 0 to Nyquist. Normalized so white
// noise of variance sigma^2 comes out flat at 2 sigma^2 / sample_rate.
struct PsdEstimate {
    std::vector<double> frequencies;
    std::vector<double> power;
    std::size_t segment_length = 0;
    Window window = Window::Hann;
};

PsdEstimate welch_psd(const TimeSeries& ts, std::size_t segment_length,
                      Window window = Window::Hann, double overlap = 0.0);

// Brick-wall frequency-domain low-pass followed by decimation. out_rate must
// divide sample_rate and cutoff must fit below both Nyquist frequencies.
TimeSeries lowpass_downsample(const TimeSeries& ts, double cutoff_hz,
                              double out_rate);

// Frequency-domain rescaling by 1/sqrt(PSD) with cosine tapering at the ends.
// DC and Nyquist weights are clamped to the nearest interior bin. Output is
// unit-variance white when the input noise matches the PSD.
TimeSeries whiten(const TimeSeries& ts, const PsdEstimate& psd,
                  double taper_fraction = 0.125);

// Linear frequency sweep with a raised-cosine envelope at both ends.
struct ChirpSpec {
    double f_start = 0.0;
    double f_end = 0.0;
    double duration = 0.0;
    double amplitude = 1.0;
    double taper_fraction = 0.1;
};

TimeSeries synth_chirp(const ChirpSpec& spec, double rate);

TimeSeries synth_noise_white(std::size_t length, double rate, double sigma,
                             std::uint64_t seed);

// Gaussian noise shaped to the given one-sided PSD (interpolated onto the
// transform grid).
TimeSeries synth_noise_psd(const PsdEstimate& psd, std::size_t length,
                           double rate, std::uint64_t seed);

TimeSeries inject(const TimeSeries& data, const TimeSeries& signal,
                  std::size_t at_index, double scale);

} // namespace qmf
