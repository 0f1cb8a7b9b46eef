#pragma once

#include <complex>
#include <vector>

namespace qmf::fft {

// Unnormalized real-to-complex forward transform (n/2 + 1 bins).
std::vector<std::complex<double>> rfft(const std::vector<double>& in);

// Inverse of rfft including the 1/n normalization.
std::vector<double> irfft(const std::vector<std::complex<double>>& in,
                          std::size_t n);

} // namespace qmf::fft
