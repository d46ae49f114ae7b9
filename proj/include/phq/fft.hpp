#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace phq {

// Real-input FFT of a fixed size, backed by FFTW. Arbitrary sizes are
// supported. Instances are not thread-safe; create one per thread.
class RealFft {
public:
    explicit RealFft(size_t n);
    ~RealFft();

    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    size_t size() const { return n_; }
    size_t bins() const { return n_ / 2 + 1; }

    // Forward transform; input shorter than n is zero-padded.
    std::vector<std::complex<double>> forward(std::span<const double> input);

    // Inverse of forward, scaled by 1/n so inverse(forward(x)) == x.
    std::vector<double> inverse(std::span<const std::complex<double>> spectrum);

private:
    size_t n_;
    void* plan_fwd_;
    void* plan_inv_;
    double* real_buf_;
    void* cplx_buf_;
};

} // namespace phq
