#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pcg/dataio.hpp"

namespace pcg {

struct Band {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
};

inline constexpr std::size_t kSynthChannels = 7;
inline constexpr double kSynthRateHz = 7812.5;
inline constexpr double kSynthDurationS = 10.0;

/// Amplitudes are relative to an S1 burst of unit RMS.
struct SynthParams {
  double heart_rate_bpm = 72.0;
  Band s1_band{20.0, 150.0};
  Band s2_band{20.0, 200.0};
  Band murmur_band{200.0, 600.0};
  double murmur_rel_power = 0.3;  // murmur power / S1 power
  std::array<double, kSynthChannels> channel_gains{1.0, 0.9, 1.1, 0.8, 1.2, 0.95, 1.05};
  std::array<double, kSynthChannels> channel_delays_ms{0.0, 0.3, 0.6, 0.9, 1.2, 1.5, 1.8};
  double ambient_noise_std = 0.1;  // -20 dB
  std::uint64_t rng_seed = 0;
};

void validate(const SynthParams& p);

struct SynthSubject {
  Recording recording;
  EpochAnnotations annotations;
};

/// 10 s of 7-channel PCG at 7812.5 Hz. The heart-sound and ambient streams
/// depend only on the seed; a CAD label adds the murmur stream on top, so
/// the two labels share everything else at equal seeds. Epoch spans are
/// given at 2 kHz.
SynthSubject synth_subject(Label label, const SynthParams& params, std::uint64_t seed,
                           const std::string& subject_id = "synth");

struct SynthDataset {
  DatasetManifest manifest;
  std::vector<Recording> recordings;
  EpochAnnotations annotations;
};

/// n_per_class subjects of each label in the training cohort plus
/// n_heldout_per_class of each in the held-out cohort. Heart rate and gains
/// are jittered per subject (+-10%, +-20%). Manifest paths are
/// "<subject_id>.wav".
SynthDataset synth_dataset(std::size_t n_per_class, const SynthParams& params, std::uint64_t seed,
                           std::size_t n_heldout_per_class = 0);

/// Writes the WAV files, manifest.csv and annotations.csv.
void write_dataset(const SynthDataset& ds, const std::filesystem::path& dir);

}  // namespace pcg
