#pragma once

#include <span>

#include "mdslab/tensor.hpp"

namespace mdslab {

enum class FftDirection { kForward, kInverse };

// Unnormalized in-place DFT of any length; forward uses exp(-j 2 pi k n / N).
void fft_inplace(std::span<Complex> data, FftDirection direction = FftDirection::kForward);

// 0.5 (1 - cos(2 pi n / N)), n = 0..N-1.
std::vector<double> hann_window(std::size_t length);

}  // namespace mdslab
