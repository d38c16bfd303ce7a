#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "pcg/error.hpp"
#include "pcg/fft.hpp"
#include "pcg/spectral.hpp"

namespace pcg {

std::vector<double> hanning_window(std::size_t n) {
  if (n < 2) throw ConfigError("hanning window needs N >= 2");
  std::vector<double> w(n + 1);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / dn));
  }
  // Exact endpoint and centre values.
  w[0] = 0.0;
  w[n] = 0.0;
  if (n % 2 == 0) w[n / 2] = 1.0;
  return w;
}

std::vector<double> hanning_taper(std::size_t length) {
  auto w = hanning_window(length);
  w.pop_back();
  return w;
}

PsdEstimate welch_psd(std::span<const double> x, double fs_hz, const WelchOptions& options) {
  const std::size_t len = options.window_length;
  if (len < 2) throw ConfigError("welch window must have at least 2 samples");
  if (!(options.overlap >= 0.0) || options.overlap >= 1.0) throw ConfigError("welch overlap must be in [0, 1)");
  if (!(fs_hz > 0.0)) throw ConfigError("sampling rate must be positive");
  if (x.size() < len) throw DataError("epoch shorter than one Welch window");

  const std::size_t overlap = static_cast<std::size_t>(std::floor(static_cast<double>(len) * options.overlap));
  const std::size_t hop = len - overlap;
  const std::size_t n_fft = next_power_of_two(len);
  const std::size_t n_bins = n_fft / 2 + 1;
  const auto window = hanning_taper(len);
  double window_power = 0.0;
  for (double w : window) window_power += w * w;

  std::vector<double> acc(n_bins, 0.0);
  std::vector<double> frame(len);
  std::size_t segments = 0;
  for (std::size_t start = 0; start + len <= x.size(); start += hop) {
    for (std::size_t i = 0; i < len; ++i) frame[i] = x[start + i] * window[i];
    const auto p = power_spectrum(frame, n_fft);
    for (std::size_t k = 0; k < n_bins; ++k) acc[k] += p[k];
    ++segments;
  }

  PsdEstimate psd;
  psd.bin_spacing_hz = fs_hz / static_cast<double>(n_fft);
  psd.freqs_hz.resize(n_bins);
  psd.density.resize(n_bins);
  const double scale = 1.0 / (fs_hz * window_power * static_cast<double>(segments));
  for (std::size_t k = 0; k < n_bins; ++k) {
    psd.freqs_hz[k] = static_cast<double>(k) * psd.bin_spacing_hz;
    const bool edge = k == 0 || k == n_fft / 2;
    psd.density[k] = acc[k] * scale * (edge ? 1.0 : 2.0);
  }
  return psd;
}

double integrate_bins(const PsdEstimate& psd, std::size_t first, std::size_t last) {
  if (last >= psd.density.size() || first > last) throw ConfigError("integration bins out of range");
  double sum = 0.0;
  for (std::size_t k = first; k < last; ++k) sum += 0.5 * (psd.density[k] + psd.density[k + 1]);
  return sum * psd.bin_spacing_hz;
}

std::size_t subband_bins(const SubbandConfig& cfg, double bin_spacing_hz) {
  if (!(cfg.sbw_hz > 0.0) || !(bin_spacing_hz > 0.0)) throw ConfigError("sub-band width must be positive");
  if (cfg.strict) {
    const bool on_grid = std::any_of(kSubBandWidthsHz.begin(), kSubBandWidthsHz.end(),
                                     [&](double g) { return std::abs(g - cfg.sbw_hz) < 1e-6; });
    if (!on_grid) throw ConfigError("sub-band width " + std::to_string(cfg.sbw_hz) + " Hz not on the supported grid");
  }
  const auto bins = static_cast<std::size_t>(std::llround(cfg.sbw_hz / bin_spacing_hz));
  if (bins < 1) throw ConfigError("sub-band narrower than one frequency bin");
  return bins;
}

std::vector<double> subband_powers(const PsdEstimate& psd, const SubbandConfig& cfg) {
  if (psd.density.size() < 2) throw DataError("empty PSD");
  const double nyquist = psd.freqs_hz.back();
  if (!(cfg.tbw_hz > 0.0) || cfg.tbw_hz > nyquist + 1e-9) throw ConfigError("total bandwidth exceeds Nyquist");
  if (cfg.strict) {
    const double hundreds = cfg.tbw_hz / 100.0;
    if (std::abs(hundreds - std::round(hundreds)) > 1e-9 || cfg.tbw_hz < 300.0 || cfg.tbw_hz > 1000.0) {
      throw ConfigError("total bandwidth must be one of 300, 400, ..., 1000 Hz");
    }
  }
  const std::size_t bins = subband_bins(cfg, psd.bin_spacing_hz);
  const auto span_bins = static_cast<std::size_t>(std::floor(cfg.tbw_hz / psd.bin_spacing_hz + 1e-9));
  const std::size_t bands = span_bins / bins;
  std::vector<double> out(bands);
  for (std::size_t b = 0; b < bands; ++b) out[b] = integrate_bins(psd, b * bins, (b + 1) * bins);
  return out;
}

}  // namespace pcg
