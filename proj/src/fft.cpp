#include "phq/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace phq {

namespace {
// FFTW plan creation is not thread-safe; execution is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

RealFft::RealFft(size_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("FFT size must be positive");
    real_buf_ = fftw_alloc_real(n_);
    fftw_complex* cbuf = fftw_alloc_complex(bins());
    cplx_buf_ = cbuf;
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan_fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_buf_, cbuf, FFTW_ESTIMATE);
    plan_inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), cbuf, real_buf_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
    fftw_free(real_buf_);
    fftw_free(static_cast<fftw_complex*>(cplx_buf_));
}

std::vector<std::complex<double>> RealFft::forward(std::span<const double> input) {
    size_t m = std::min(input.size(), n_);
    std::memcpy(real_buf_, input.data(), m * sizeof(double));
    if (m < n_) std::memset(real_buf_ + m, 0, (n_ - m) * sizeof(double));
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    auto* cbuf = static_cast<fftw_complex*>(cplx_buf_);
    std::vector<std::complex<double>> out(bins());
    for (size_t i = 0; i < out.size(); ++i) out[i] = {cbuf[i][0], cbuf[i][1]};
    return out;
}

std::vector<double> RealFft::inverse(std::span<const std::complex<double>> spectrum) {
    if (spectrum.size() != bins())
        throw std::invalid_argument("spectrum size does not match FFT bins");
    auto* cbuf = static_cast<fftw_complex*>(cplx_buf_);
    for (size_t i = 0; i < spectrum.size(); ++i) {
        cbuf[i][0] = spectrum[i].real();
        cbuf[i][1] = spectrum[i].imag();
    }
    fftw_execute(static_cast<fftw_plan>(plan_inv_));
    std::vector<double> out(n_);
    double scale = 1.0 / static_cast<double>(n_);
    for (size_t i = 0; i < n_; ++i) out[i] = real_buf_[i] * scale;
    return out;
}

} // namespace phq
