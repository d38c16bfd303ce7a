#include <cmath>
#include <numbers>

#include "pcg/error.hpp"
#include "pcg/preprocess.hpp"

namespace pcg {

std::vector<Biquad> design_butterworth_lowpass(const FilterSpec& spec, double fs_hz) {
  if (spec.order < 1) throw ConfigError("filter order must be >= 1");
  if (!(fs_hz > 0.0)) throw ConfigError("sampling rate must be positive");
  if (!(spec.cutoff_hz > 0.0) || spec.cutoff_hz >= fs_hz / 2.0) {
    throw ConfigError("cutoff must lie in (0, Nyquist)");
  }
  // Prewarped analog cutoff, expressed through K = tan(pi fc / fs).
  const double k = std::tan(std::numbers::pi * spec.cutoff_hz / fs_hz);
  const double k2 = k * k;
  const int n = spec.order;

  std::vector<Biquad> sections;
  for (int i = 0; i < n / 2; ++i) {
    // Pole pair at angle theta from the negative real axis: s^2 + s/Q + 1.
    const double theta = std::numbers::pi * (2.0 * i + 1.0) / (2.0 * n);
    const double inv_q = 2.0 * std::cos(theta);
    const double norm = 1.0 / (1.0 + k * inv_q + k2);
    Biquad s;
    s.b0 = k2 * norm;
    s.b1 = 2.0 * s.b0;
    s.b2 = s.b0;
    s.a1 = 2.0 * (k2 - 1.0) * norm;
    s.a2 = (1.0 - k * inv_q + k2) * norm;
    sections.push_back(s);
  }
  if (n % 2 == 1) {
    const double norm = 1.0 / (1.0 + k);
    Biquad s;
    s.b0 = k * norm;
    s.b1 = s.b0;
    s.a1 = (k - 1.0) * norm;
    sections.push_back(s);
  }
  return sections;
}

std::vector<double> apply_sections(std::span<const Biquad> sections, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  for (const auto& s : sections) {
    double z1 = 0.0, z2 = 0.0;
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

std::vector<double> lowpass_filter(std::span<const double> signal, const FilterSpec& spec, double fs_hz) {
  const auto sections = design_butterworth_lowpass(spec, fs_hz);
  return apply_sections(sections, signal);
}

}  // namespace pcg
