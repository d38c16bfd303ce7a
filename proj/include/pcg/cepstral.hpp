#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pcg/types.hpp"

namespace pcg {

enum class FilterScale { linear, mel, gammatone };

std::string_view to_string(FilterScale scale);
FilterScale parse_filter_scale(std::string_view token);

struct CepstralConfig {
  FilterScale scale = FilterScale::linear;
  int num_filters = 12;
  double fmax_hz = 1000.0;
  int num_frames = 108;
  int coeff_lo = 0;
  int coeff_hi = 7;
  /// Restricts num_frames to the investigated grid (20..64, 100..112, even).
  bool strict = true;

  std::size_t num_coefficients() const { return static_cast<std::size_t>(coeff_hi - coeff_lo + 1); }
  std::size_t feature_dimension() const { return static_cast<std::size_t>(num_frames) * num_coefficients(); }

  /// Defaults for a scale: 12 filters for linear/mel, 14 for gammatone.
  static CepstralConfig for_scale(FilterScale scale);
};

/// Throws ConfigError when the configuration breaks its invariants.
void validate(const CepstralConfig& cfg);

bool is_investigated_frame_count(int frames);

struct FrameLayout {
  std::size_t length = 0;
  std::size_t hop = 0;
  std::size_t count = 0;
};

/// F frames at 50% overlap: length floor(2 Ns / (F + 1)), hop floor(length / 2).
FrameLayout frame_layout(std::size_t n_samples, int num_frames);

/// Views into `samples`, one per frame.
std::vector<std::span<const double>> frame_epoch(std::span<const double> samples, int num_frames);

double hz_to_mel(double hz);
double mel_to_hz(double mel);
/// Equivalent rectangular bandwidth in Hz: 24.7 (4.37 f / 1000 + 1).
double erb_bandwidth(double hz);
double hz_to_erb_rate(double hz);
double erb_rate_to_hz(double erb);

struct FilterBank {
  FilterScale scale = FilterScale::linear;
  Matrix responses;               // [num_filters x (n_fft/2 + 1)]
  std::vector<double> centers_hz;
  std::vector<double> edges_hz;   // triangular banks only: f_0 .. f_{K+1}
  std::size_t n_fft = 0;
  double fs_hz = 0.0;

  std::size_t size() const { return responses.rows(); }
};

/// Triangular banks (linear/mel) follow the piecewise-linear definition with
/// edges equally spaced on the scale from 0 to fmax. Gammatone rows are
/// 4th-order magnitude responses at ERB-rate spaced centres between 50 Hz
/// and fmax, each peak-normalized to 1.
FilterBank build_filterbank(const CepstralConfig& cfg, std::size_t n_fft, double fs_hz);

/// Memoized build_filterbank keyed by (scale, filters, fmax, n_fft, fs).
/// Safe for concurrent use.
std::shared_ptr<const FilterBank> cached_filterbank(const CepstralConfig& cfg, std::size_t n_fft, double fs_hz);

/// DCT-II. With `orthonormal`, coefficient 0 is scaled by sqrt(1/N) and the
/// rest by sqrt(2/N), making the transform orthogonal.
std::vector<double> dct_ii(std::span<const double> x, bool orthonormal = true);
/// Inverse of the orthonormal dct_ii.
std::vector<double> inverse_dct_ii(std::span<const double> c);

inline constexpr double kLogEnergyFloor = 1e-12;

/// Natural log of filter-bank energies of a Hann-tapered frame, floored.
std::vector<double> log_filterbank_energies(std::span<const double> frame, const FilterBank& fb);

/// Cepstral coefficients coeff_lo..coeff_hi of one frame. The filter bank must
/// match the frame's FFT size (next power of two >= frame length).
std::vector<double> frame_cepstra(std::span<const double> frame, const FilterBank& fb, int coeff_lo, int coeff_hi);

/// Frame-major concatenation of per-frame coefficient subsets.
std::vector<double> epoch_feature_vector(std::span<const double> samples, const CepstralConfig& cfg,
                                         double fs_hz = 2000.0);

}  // namespace pcg
