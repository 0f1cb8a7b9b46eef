#pragma once

#include <cstddef>
#include <vector>

namespace qmf {

// Uniformly sampled real-valued series. Serves as both the data stream and
// the template waveform.
struct TimeSeries {
    std::vector<double> samples;
    double sample_rate = 1.0; // samples per second, > 0
    double epoch = 0.0;       // start time in seconds

    std::size_t size() const { return samples.size(); }
    double duration() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
    double time_at(std::size_t i) const {
        return epoch + static_cast<double>(i) / sample_rate;
    }
};

// Throws std::invalid_argument on an empty series, nonpositive rate, or
// non-finite samples.
void validate(const TimeSeries& ts);

} // namespace qmf
