#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pcg/dataio.hpp"
#include "pcg/types.hpp"

namespace pcg {

/// Z-normalized two-heart-cycle segment of one channel at the analysis rate.
struct Epoch {
  std::string subject_id;
  int channel_id = 1;  // 1-based transducer number
  int epoch_idx = 0;
  Label label = Label::normal;
  std::vector<double> samples;
};

inline constexpr std::size_t kMinEpochSamples = 2111;
inline constexpr std::size_t kMaxEpochSamples = 5299;

struct FilterSpec {
  int order = 8;
  double cutoff_hz = 1000.0;
};

/// One biquad, direct-form coefficients with a0 normalized to 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

/// Butterworth low-pass as cascaded second-order sections, bilinear transform
/// with cutoff prewarping. Odd orders end with a first-order section
/// (b2 = a2 = 0). Throws ConfigError when cutoff >= fs/2.
std::vector<Biquad> design_butterworth_lowpass(const FilterSpec& spec, double fs_hz);

/// Causal (forward-only) cascade application, transposed direct form II.
std::vector<double> apply_sections(std::span<const Biquad> sections, std::span<const double> x);

std::vector<double> lowpass_filter(std::span<const double> signal, const FilterSpec& spec, double fs_hz);

struct RateRatio {
  std::size_t up = 1;
  std::size_t down = 1;
};

/// Reduced p/q with fs_out/fs_in = p/q. Rates must be multiples of 1 mHz and
/// p, q at most 10^6; anything else is rejected as irrational.
RateRatio rational_ratio(double fs_in, double fs_out);

/// Polyphase rational resampler with a Kaiser-windowed sinc anti-imaging
/// filter. Output length is round(n * fs_out / fs_in); edges are extended
/// with the boundary sample.
std::vector<double> resample(std::span<const double> signal, double fs_in, double fs_out);

struct SegmentOptions {
  bool strict = true;  // enforce kMin/kMaxEpochSamples
};

/// Cuts every span (time-ordered, one subject) from every channel with the
/// same indices. Output order: span-major, channel-minor. Samples are not
/// normalized.
std::vector<Epoch> segment_epochs(const Recording& recording_2k, std::span<const EpochSpan> spans,
                                  Label label, const SegmentOptions& options = {});

/// (x - mean) / population std. Throws NumericError on zero variance.
std::vector<double> z_normalize(std::span<const double> samples);
Epoch z_normalize(Epoch epoch);

struct PreprocessOptions {
  FilterSpec filter;
  double target_fs_hz = 2000.0;
  bool strict = true;
};

enum class PreprocessStage { filter, resample, segment, normalize };

/// filter -> resample -> segment -> z-normalize for one subject. When `trace`
/// is given, each stage invocation is appended in call order.
std::vector<Epoch> preprocess_subject(const Recording& recording, std::span<const EpochSpan> spans,
                                      Label label, const PreprocessOptions& options = {},
                                      std::vector<PreprocessStage>* trace = nullptr);

}  // namespace pcg
