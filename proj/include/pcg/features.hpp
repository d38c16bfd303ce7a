#pragma once

#include <map>
#include <span>
#include <vector>

#include "pcg/cepstral.hpp"
#include "pcg/dataio.hpp"
#include "pcg/preprocess.hpp"
#include "pcg/selection.hpp"
#include "pcg/spectral.hpp"

namespace pcg {

enum class FeatureFamily { psd, lfcc, mfcc, gfcc };

std::string_view to_string(FeatureFamily family);
FeatureFamily parse_feature_family(std::string_view token);
/// Filter scale behind a cepstral family; throws ConfigError for psd.
FilterScale scale_of(FeatureFamily family);

/// One channel's extractor settings. `cepstral.scale` follows the family.
struct FeatureSpec {
  FeatureFamily family = FeatureFamily::lfcc;
  SubbandConfig subband;
  CepstralConfig cepstral;

  std::size_t dimension() const;
};

/// Feature vector of one normalized epoch at 2 kHz.
std::vector<double> epoch_features(std::span<const double> samples, const FeatureSpec& spec);

/// Preprocesses every manifest entry of the cohort (manifest order), loading
/// recordings through `load`. Epochs come back subject-major, then epoch,
/// then channel.
std::vector<Epoch> preprocess_cohort(const DatasetManifest& manifest, const EpochAnnotations& annotations,
                                     Cohort cohort, const PreprocessOptions& options, unsigned jobs);

/// Same, from recordings already in memory (synthetic runs).
std::vector<Epoch> preprocess_recordings(std::span<const Recording> recordings, std::span<const Label> labels,
                                         const EpochAnnotations& annotations, const PreprocessOptions& options,
                                         unsigned jobs);

/// Feature matrix of one channel; rows follow the order of the epochs.
FeatureMatrix channel_features(std::span<const Epoch> epochs, int channel, const FeatureSpec& spec, unsigned jobs);

/// Per-channel matrices for every channel in `specs`.
std::map<int, FeatureMatrix> extract_features(std::span<const Epoch> epochs, const std::map<int, FeatureSpec>& specs,
                                              unsigned jobs);

}  // namespace pcg
