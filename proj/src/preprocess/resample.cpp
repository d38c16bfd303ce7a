#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pcg/error.hpp"
#include "pcg/preprocess.hpp"

namespace pcg {

namespace {

constexpr double kKaiserBeta = 5.0;
constexpr std::size_t kZeroCrossings = 10;
constexpr unsigned long long kMaxFactor = 1000000;

bool to_millihertz(double fs, unsigned long long& out) {
  const double scaled = fs * 1000.0;
  const double rounded = std::round(scaled);
  if (!(rounded >= 1.0) || std::abs(scaled - rounded) > 1e-6 * std::max(1.0, rounded)) return false;
  out = static_cast<unsigned long long>(rounded);
  return true;
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

RateRatio rational_ratio(double fs_in, double fs_out) {
  unsigned long long in = 0, out = 0;
  if (!(fs_in > 0.0) || !(fs_out > 0.0) || !to_millihertz(fs_in, in) || !to_millihertz(fs_out, out)) {
    throw ConfigError("irrational or non-positive rate pair");
  }
  const unsigned long long g = std::gcd(in, out);
  RateRatio r{static_cast<std::size_t>(out / g), static_cast<std::size_t>(in / g)};
  if (r.up > kMaxFactor || r.down > kMaxFactor) throw ConfigError("irrational or non-positive rate pair");
  return r;
}

std::vector<double> resample(std::span<const double> x, double fs_in, double fs_out) {
  const RateRatio ratio = rational_ratio(fs_in, fs_out);
  const std::size_t p = ratio.up;
  const std::size_t q = ratio.down;
  const std::size_t n_in = x.size();
  const std::size_t n_out = (n_in * p + q / 2) / q;
  if (n_in == 0) return {};
  if (p == 1 && q == 1) return {x.begin(), x.end()};

  // Prototype low-pass at the upsampled rate, cutoff at the lower Nyquist.
  const std::size_t m = std::max(p, q);
  const std::size_t half = kZeroCrossings * m;
  const std::size_t taps = 2 * half + 1;
  const double fc = 0.5 / static_cast<double>(m);
  const double i0_beta = std::cyl_bessel_i(0.0, kKaiserBeta);
  std::vector<double> h(taps);
  for (std::size_t k = 0; k < taps; ++k) {
    const double t = static_cast<double>(k) - static_cast<double>(half);
    const double r = t / static_cast<double>(half);
    const double window = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[k] = 2.0 * fc * sinc(2.0 * fc * t) * window;
  }

  // Split into p phases; each phase is normalized to unit DC gain.
  std::vector<std::vector<double>> phases(p);
  for (std::size_t phase = 0; phase < p; ++phase) {
    for (std::size_t k = phase; k < taps; k += p) phases[phase].push_back(h[k]);
    const double sum = std::accumulate(phases[phase].begin(), phases[phase].end(), 0.0);
    if (sum != 0.0) {
      for (double& v : phases[phase]) v /= sum;
    }
  }

  auto sample = [&](long long i) {
    if (i < 0) return x.front();
    if (i >= static_cast<long long>(n_in)) return x.back();
    return x[static_cast<std::size_t>(i)];
  };

  std::vector<double> y(n_out);
  for (std::size_t mo = 0; mo < n_out; ++mo) {
    const std::size_t t = mo * q + half;
    const long long i_top = static_cast<long long>(t / p);
    const auto& taps_phase = phases[t % p];
    double acc = 0.0;
    for (std::size_t r = 0; r < taps_phase.size(); ++r) acc += taps_phase[r] * sample(i_top - static_cast<long long>(r));
    y[mo] = acc;
  }
  return y;
}

}  // namespace pcg
