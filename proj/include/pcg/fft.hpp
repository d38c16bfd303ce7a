#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pcg {

std::size_t next_power_of_two(std::size_t n);

/// In-place iterative radix-2 FFT. Size must be a power of two.
/// The inverse transform is scaled by 1/N.
void fft_inplace(std::span<std::complex<double>> data, bool inverse = false);

/// |X[k]|^2 for k = 0..n_fft/2 of a real input zero-padded to n_fft.
std::vector<double> power_spectrum(std::span<const double> x, std::size_t n_fft);

}  // namespace pcg
