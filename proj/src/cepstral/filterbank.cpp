#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>

#include "pcg/cepstral.hpp"
#include "pcg/error.hpp"

namespace pcg {

std::string_view to_string(FilterScale scale) {
  switch (scale) {
    case FilterScale::linear: return "linear";
    case FilterScale::mel: return "mel";
    case FilterScale::gammatone: return "gammatone";
  }
  return "linear";
}

FilterScale parse_filter_scale(std::string_view token) {
  std::string t(token);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "linear" || t == "lfcc") return FilterScale::linear;
  if (t == "mel" || t == "mfcc") return FilterScale::mel;
  if (t == "gammatone" || t == "gfcc") return FilterScale::gammatone;
  throw ConfigError("unknown filter scale '" + t + "'");
}

CepstralConfig CepstralConfig::for_scale(FilterScale scale) {
  CepstralConfig cfg;
  cfg.scale = scale;
  cfg.num_filters = scale == FilterScale::gammatone ? 14 : 12;
  return cfg;
}

bool is_investigated_frame_count(int f) {
  if (f % 2 != 0) return false;
  return (f >= 20 && f <= 64) || (f >= 100 && f <= 112);
}

void validate(const CepstralConfig& cfg) {
  if (cfg.num_filters < 1) throw ConfigError("num_filters must be >= 1");
  if (!(cfg.fmax_hz > 0.0)) throw ConfigError("fmax must be positive");
  if (cfg.coeff_lo < 0 || cfg.coeff_lo > cfg.coeff_hi || cfg.coeff_hi >= cfg.num_filters) {
    throw ConfigError("coefficient subset must satisfy 0 <= lo <= hi < num_filters");
  }
  if (cfg.num_frames < 1) throw ConfigError("num_frames must be >= 1");
  if (cfg.strict && !is_investigated_frame_count(cfg.num_frames)) {
    throw ConfigError("num_frames " + std::to_string(cfg.num_frames) + " outside the investigated grid");
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }
double erb_bandwidth(double hz) { return 24.7 * (4.37 * hz / 1000.0 + 1.0); }
double hz_to_erb_rate(double hz) { return 21.4 * std::log10(1.0 + 4.37 * hz / 1000.0); }
double erb_rate_to_hz(double erb) { return (std::pow(10.0, erb / 21.4) - 1.0) * 1000.0 / 4.37; }

namespace {

constexpr double kGammatoneLowHz = 50.0;
constexpr double kGammatoneBandwidthFactor = 1.019;
constexpr int kGammatoneOrder = 4;

void build_triangular(FilterBank& fb, const CepstralConfig& cfg) {
  const int k_count = cfg.num_filters;
  const bool mel = cfg.scale == FilterScale::mel;
  const double top = mel ? hz_to_mel(cfg.fmax_hz) : cfg.fmax_hz;
  fb.edges_hz.resize(static_cast<std::size_t>(k_count) + 2);
  for (int i = 0; i <= k_count + 1; ++i) {
    const double v = top * static_cast<double>(i) / static_cast<double>(k_count + 1);
    fb.edges_hz[static_cast<std::size_t>(i)] = mel ? mel_to_hz(v) : v;
  }
  fb.edges_hz.front() = 0.0;
  fb.edges_hz.back() = cfg.fmax_hz;

  const std::size_t n_bins = fb.responses.cols();
  for (int k = 1; k <= k_count; ++k) {
    const double lo = fb.edges_hz[static_cast<std::size_t>(k - 1)];
    const double mid = fb.edges_hz[static_cast<std::size_t>(k)];
    const double hi = fb.edges_hz[static_cast<std::size_t>(k + 1)];
    fb.centers_hz.push_back(mid);
    for (std::size_t b = 0; b < n_bins; ++b) {
      const double f = static_cast<double>(b) * fb.fs_hz / static_cast<double>(fb.n_fft);
      double h = 0.0;
      if (f >= lo && f < mid) {
        h = (f - lo) / (mid - lo);
      } else if (f >= mid && f < hi) {
        h = (hi - f) / (hi - mid);
      }
      fb.responses(static_cast<std::size_t>(k - 1), b) = h;
    }
  }
}

void build_gammatone(FilterBank& fb, const CepstralConfig& cfg) {
  const int k_count = cfg.num_filters;
  const double lo = hz_to_erb_rate(std::min(kGammatoneLowHz, cfg.fmax_hz));
  const double hi = hz_to_erb_rate(cfg.fmax_hz);
  const std::size_t n_bins = fb.responses.cols();
  for (int k = 0; k < k_count; ++k) {
    const double t = k_count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(k_count - 1);
    const double fc = erb_rate_to_hz(lo + t * (hi - lo));
    fb.centers_hz.push_back(fc);
    const double bw = kGammatoneBandwidthFactor * erb_bandwidth(fc);
    double peak = 0.0;
    for (std::size_t b = 0; b < n_bins; ++b) {
      const double f = static_cast<double>(b) * fb.fs_hz / static_cast<double>(fb.n_fft);
      const double u = (f - fc) / bw;
      const double h = std::pow(1.0 + u * u, -kGammatoneOrder / 2.0);
      fb.responses(static_cast<std::size_t>(k), b) = h;
      peak = std::max(peak, h);
    }
    for (std::size_t b = 0; b < n_bins; ++b) fb.responses(static_cast<std::size_t>(k), b) /= peak;
  }
}

}  // namespace

FilterBank build_filterbank(const CepstralConfig& cfg, std::size_t n_fft, double fs_hz) {
  if (cfg.num_filters < 1) throw ConfigError("num_filters must be >= 1");
  if (!(fs_hz > 0.0)) throw ConfigError("sampling rate must be positive");
  if (!(cfg.fmax_hz > 0.0) || cfg.fmax_hz > fs_hz / 2.0 + 1e-9) throw ConfigError("fmax exceeds Nyquist");
  if (n_fft < 2) throw ConfigError("n_fft must be >= 2");

  FilterBank fb;
  fb.scale = cfg.scale;
  fb.n_fft = n_fft;
  fb.fs_hz = fs_hz;
  fb.responses = Matrix(static_cast<std::size_t>(cfg.num_filters), n_fft / 2 + 1);
  if (cfg.scale == FilterScale::gammatone) {
    build_gammatone(fb, cfg);
  } else {
    build_triangular(fb, cfg);
  }
  return fb;
}

std::shared_ptr<const FilterBank> cached_filterbank(const CepstralConfig& cfg, std::size_t n_fft, double fs_hz) {
  using Key = std::tuple<int, int, double, std::size_t, double>;
  static std::shared_mutex mutex;
  static std::map<Key, std::shared_ptr<const FilterBank>> cache;

  const Key key{static_cast<int>(cfg.scale), cfg.num_filters, cfg.fmax_hz, n_fft, fs_hz};
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const FilterBank>(build_filterbank(cfg, n_fft, fs_hz));
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(key, std::move(built));
  return it->second;
}

}  // namespace pcg
