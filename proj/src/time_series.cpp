#include "qmf/time_series.hpp"

#include <cmath>
#include <stdexcept>

namespace qmf {

void validate(const TimeSeries& ts) {
    if (ts.samples.empty())
        throw std::invalid_argument("TimeSeries: empty sample list");
    if (!(ts.sample_rate > 0.0))
        throw std::invalid_argument("TimeSeries: sample_rate must be > 0");
    for (double x : ts.samples)
        if (!std::isfinite(x))
            throw std::invalid_argument("TimeSeries: non-finite sample");
}

} // namespace qmf
