#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace qmf::fft {

namespace {
// The FFTW planner is not thread-safe; transforms here are short enough that
// serializing whole calls costs nothing.
std::mutex fftw_mutex;
} // namespace

std::vector<std::complex<double>> rfft(const std::vector<double>& in) {
    if (in.empty()) throw std::invalid_argument("rfft: empty input");
    const std::size_t n = in.size();
    std::vector<double> buf(in);
    std::vector<std::complex<double>> out(n / 2 + 1);

    std::lock_guard lock(fftw_mutex);
    fftw_plan plan = fftw_plan_dft_r2c_1d(
        static_cast<int>(n), buf.data(),
        reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return out;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& in,
                          std::size_t n) {
    if (in.size() != n / 2 + 1)
        throw std::invalid_argument("irfft: spectrum length mismatch");
    std::vector<std::complex<double>> buf(in);
    std::vector<double> out(n);

    std::lock_guard lock(fftw_mutex);
    fftw_plan plan = fftw_plan_dft_c2r_1d(
        static_cast<int>(n), reinterpret_cast<fftw_complex*>(buf.data()),
        out.data(), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    for (double& x : out) x /= static_cast<double>(n);
    return out;
}

} // namespace qmf::fft
