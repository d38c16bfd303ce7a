#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace pcg {

/// w(n) = 0.5 (1 - cos(2 pi n / N)) for n = 0..N, i.e. N + 1 weights.
/// Throws ConfigError for N < 2.
std::vector<double> hanning_window(std::size_t n);

/// First `length` weights of hanning_window(length): the periodic window
/// used to taper a frame of that many samples.
std::vector<double> hanning_taper(std::size_t length);

struct PsdEstimate {
  std::vector<double> freqs_hz;
  std::vector<double> density;  // power per Hz, one-sided
  double bin_spacing_hz = 0.0;
};

struct WelchOptions {
  std::size_t window_length = 1024;
  double overlap = 0.5;
};

/// Averaged Hann-windowed periodograms, one-sided, normalized so that the
/// integral of the density over [0, fs/2] estimates the signal variance.
/// The FFT size is the next power of two >= window_length.
PsdEstimate welch_psd(std::span<const double> x, double fs_hz, const WelchOptions& options = {});

/// Trapezoidal integral of the density between bins [first, last].
double integrate_bins(const PsdEstimate& psd, std::size_t first, std::size_t last);

inline constexpr std::array<double, 8> kSubBandWidthsHz = {5.86, 11.72, 17.58, 23.44, 29.30, 35.16, 46.88, 58.6};

struct SubbandConfig {
  double sbw_hz = 11.72;
  double tbw_hz = 1000.0;
  /// Requires sbw on the investigated grid and tbw in {300, 400, ..., 1000}.
  bool strict = true;
};

/// Number of PSD bins covered by one sub-band for the given bin spacing.
std::size_t subband_bins(const SubbandConfig& cfg, double bin_spacing_hz);

/// Trapezoidal power in consecutive sub-bands over [0, tbw]; a trailing
/// partial band is dropped.
std::vector<double> subband_powers(const PsdEstimate& psd, const SubbandConfig& cfg);

}  // namespace pcg
