#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace gridkr::detail {

namespace {
// FFTW plan creation is not thread safe; execution of distinct plans is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

void fft(std::vector<std::complex<double>>& data, const std::vector<int>& shape, int sign) {
    long long n = 1;
    for (int s : shape) n *= s;
    if (n != static_cast<long long>(data.size()))
        throw std::invalid_argument("fft: shape does not match data size");
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), ptr, ptr,
                             sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fft: plan creation failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
}

std::vector<std::complex<double>> fft_real_1d(const std::vector<double>& data) {
    std::vector<std::complex<double>> z(data.begin(), data.end());
    fft(z, {static_cast<int>(data.size())}, -1);
    return z;
}

}  // namespace gridkr::detail
