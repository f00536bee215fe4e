#pragma once

#include <complex>
#include <vector>

namespace gridkr::detail {

// In-place d-dimensional complex DFT over a row-major array.
// sign = -1: forward (e^{-j...}), sign = +1: backward. Unnormalized.
void fft(std::vector<std::complex<double>>& data, const std::vector<int>& shape, int sign);

// Forward DFT of a real vector, returning the full complex spectrum.
std::vector<std::complex<double>> fft_real_1d(const std::vector<double>& data);

}  // namespace gridkr::detail
