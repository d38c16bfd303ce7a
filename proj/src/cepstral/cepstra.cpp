#include <algorithm>
#include <cmath>
#include <numbers>

#include "pcg/cepstral.hpp"
#include "pcg/error.hpp"
#include "pcg/fft.hpp"
#include "pcg/spectral.hpp"

namespace pcg {

FrameLayout frame_layout(std::size_t n_samples, int num_frames) {
  if (num_frames < 1) throw ConfigError("num_frames must be >= 1");
  const auto f = static_cast<std::size_t>(num_frames);
  if (n_samples < f + 1) {
    throw DataError("epoch too short for " + std::to_string(num_frames) + " frames (" + std::to_string(n_samples) +
                    " samples)");
  }
  FrameLayout layout;
  layout.length = (2 * n_samples) / (f + 1);
  layout.hop = layout.length / 2;
  layout.count = f;
  return layout;
}

std::vector<std::span<const double>> frame_epoch(std::span<const double> samples, int num_frames) {
  const auto layout = frame_layout(samples.size(), num_frames);
  std::vector<std::span<const double>> frames;
  frames.reserve(layout.count);
  for (std::size_t i = 0; i < layout.count; ++i) frames.push_back(samples.subspan(i * layout.hop, layout.length));
  return frames;
}

std::vector<double> dct_ii(std::span<const double> x, bool orthonormal) {
  const std::size_t n = x.size();
  std::vector<double> c(n, 0.0);
  if (n == 0) return c;
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc += x[k] * std::cos(std::numbers::pi / dn * static_cast<double>(i) * (static_cast<double>(k) + 0.5));
    }
    if (orthonormal) acc *= std::sqrt((i == 0 ? 1.0 : 2.0) / dn);
    c[i] = acc;
  }
  return c;
}

std::vector<double> inverse_dct_ii(std::span<const double> c) {
  const std::size_t n = c.size();
  std::vector<double> x(n, 0.0);
  if (n == 0) return x;
  const double dn = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = c[0] * std::sqrt(1.0 / dn);
    for (std::size_t i = 1; i < n; ++i) {
      acc += c[i] * std::sqrt(2.0 / dn) *
             std::cos(std::numbers::pi / dn * static_cast<double>(i) * (static_cast<double>(k) + 0.5));
    }
    x[k] = acc;
  }
  return x;
}

std::vector<double> log_filterbank_energies(std::span<const double> frame, const FilterBank& fb) {
  if (frame.size() < 2) throw DataError("frame must have at least 2 samples");
  const std::size_t n_fft = next_power_of_two(frame.size());
  if (n_fft != fb.n_fft) throw ConfigError("filter bank FFT size does not match frame");
  const auto taper = hanning_taper(frame.size());
  std::vector<double> windowed(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) windowed[i] = frame[i] * taper[i];
  const auto power = power_spectrum(windowed, n_fft);

  std::vector<double> log_e(fb.size());
  for (std::size_t k = 0; k < fb.size(); ++k) {
    const auto h = fb.responses.row(k);
    double e = 0.0;
    for (std::size_t b = 0; b < power.size(); ++b) e += h[b] * power[b];
    log_e[k] = std::log(std::max(e, kLogEnergyFloor));
  }
  return log_e;
}

std::vector<double> frame_cepstra(std::span<const double> frame, const FilterBank& fb, int coeff_lo, int coeff_hi) {
  if (coeff_lo < 0 || coeff_lo > coeff_hi || static_cast<std::size_t>(coeff_hi) >= fb.size()) {
    throw ConfigError("coefficient subset outside the filter bank");
  }
  const auto c = dct_ii(log_filterbank_energies(frame, fb));
  return {c.begin() + coeff_lo, c.begin() + coeff_hi + 1};
}

std::vector<double> epoch_feature_vector(std::span<const double> samples, const CepstralConfig& cfg, double fs_hz) {
  validate(cfg);
  const auto frames = frame_epoch(samples, cfg.num_frames);
  const auto fb = cached_filterbank(cfg, next_power_of_two(frames.front().size()), fs_hz);
  std::vector<double> out;
  out.reserve(cfg.feature_dimension());
  for (const auto& frame : frames) {
    const auto c = frame_cepstra(frame, *fb, cfg.coeff_lo, cfg.coeff_hi);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

}  // namespace pcg
