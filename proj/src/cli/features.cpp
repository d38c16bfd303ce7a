#include "pcg/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "pcg/error.hpp"
#include "pcg/parallel.hpp"

namespace pcg {

std::string_view to_string(FeatureFamily family) {
  switch (family) {
    case FeatureFamily::psd: return "psd";
    case FeatureFamily::lfcc: return "lfcc";
    case FeatureFamily::mfcc: return "mfcc";
    case FeatureFamily::gfcc: return "gfcc";
  }
  return "lfcc";
}

FeatureFamily parse_feature_family(std::string_view token) {
  std::string t(token);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "psd") return FeatureFamily::psd;
  if (t == "lfcc") return FeatureFamily::lfcc;
  if (t == "mfcc") return FeatureFamily::mfcc;
  if (t == "gfcc") return FeatureFamily::gfcc;
  throw ConfigError("unknown feature family '" + t + "'");
}

FilterScale scale_of(FeatureFamily family) {
  switch (family) {
    case FeatureFamily::lfcc: return FilterScale::linear;
    case FeatureFamily::mfcc: return FilterScale::mel;
    case FeatureFamily::gfcc: return FilterScale::gammatone;
    case FeatureFamily::psd: break;
  }
  throw ConfigError("psd is not a cepstral family");
}

std::size_t FeatureSpec::dimension() const {
  if (family == FeatureFamily::psd) {
    // Matches subband_powers at the 2 kHz / 1024-point Welch grid.
    const double df = 2000.0 / 1024.0;
    const std::size_t m = subband_bins(subband, df);
    return static_cast<std::size_t>(std::floor(subband.tbw_hz / df + 1e-9)) / m;
  }
  return cepstral.feature_dimension();
}

std::vector<double> epoch_features(std::span<const double> samples, const FeatureSpec& spec) {
  if (spec.family == FeatureFamily::psd) return subband_powers(welch_psd(samples, 2000.0), spec.subband);
  CepstralConfig cfg = spec.cepstral;
  cfg.scale = scale_of(spec.family);
  return epoch_feature_vector(samples, cfg, 2000.0);
}

namespace {

std::vector<Epoch> flatten(std::vector<std::vector<Epoch>> per_subject) {
  std::vector<Epoch> out;
  for (auto& v : per_subject) std::move(v.begin(), v.end(), std::back_inserter(out));
  return out;
}

}  // namespace

std::vector<Epoch> preprocess_cohort(const DatasetManifest& manifest, const EpochAnnotations& annotations,
                                     Cohort cohort, const PreprocessOptions& options, unsigned jobs) {
  const auto entries = manifest.cohort(cohort);
  std::vector<std::vector<Epoch>> per_subject(entries.size());
  parallel_for(entries.size(), jobs, [&](std::size_t i) {
    const auto& e = entries[i];
    Recording rec = load_recording(e.path);
    rec.subject_id = e.subject_id;
    const auto spans = annotations.for_subject(e.subject_id);
    if (spans.empty()) throw DataError("no epoch annotations for subject " + e.subject_id);
    per_subject[i] = preprocess_subject(rec, spans, e.label, options);
  });
  return flatten(std::move(per_subject));
}

std::vector<Epoch> preprocess_recordings(std::span<const Recording> recordings, std::span<const Label> labels,
                                         const EpochAnnotations& annotations, const PreprocessOptions& options,
                                         unsigned jobs) {
  if (recordings.size() != labels.size()) throw DataError("recordings and labels differ in length");
  std::vector<std::vector<Epoch>> per_subject(recordings.size());
  parallel_for(recordings.size(), jobs, [&](std::size_t i) {
    const auto spans = annotations.for_subject(recordings[i].subject_id);
    if (spans.empty()) throw DataError("no epoch annotations for subject " + recordings[i].subject_id);
    per_subject[i] = preprocess_subject(recordings[i], spans, labels[i], options);
  });
  return flatten(std::move(per_subject));
}

FeatureMatrix channel_features(std::span<const Epoch> epochs, int channel, const FeatureSpec& spec, unsigned jobs) {
  std::vector<const Epoch*> rows;
  for (const auto& e : epochs) {
    if (e.channel_id == channel) rows.push_back(&e);
  }
  if (rows.empty()) throw DataError("no epochs for channel " + std::to_string(channel));

  const std::size_t d = spec.dimension();
  FeatureMatrix fm;
  fm.x = Matrix(rows.size(), d);
  parallel_for(rows.size(), jobs, [&](std::size_t r) {
    const auto v = epoch_features(rows[r]->samples, spec);
    if (v.size() != d) throw NumericError("feature vector length differs from the configured dimension");
    std::copy(v.begin(), v.end(), fm.x.row(r).begin());
  });
  for (const Epoch* e : rows) {
    fm.y.push_back(e->label);
    fm.subject_ids.push_back(e->subject_id);
    fm.epoch_idx.push_back(e->epoch_idx);
  }
  const std::string family(to_string(spec.family));
  if (spec.family == FeatureFamily::psd) {
    for (std::size_t b = 0; b < d; ++b) fm.columns.push_back({channel, family + ":band" + std::to_string(b)});
  } else {
    const auto nc = spec.cepstral.num_coefficients();
    for (std::size_t j = 0; j < d; ++j) {
      fm.columns.push_back({channel, family + ":frame" + std::to_string(j / nc) + ":c" +
                                         std::to_string(static_cast<std::size_t>(spec.cepstral.coeff_lo) + j % nc)});
    }
  }
  return fm;
}

std::map<int, FeatureMatrix> extract_features(std::span<const Epoch> epochs, const std::map<int, FeatureSpec>& specs,
                                              unsigned jobs) {
  std::map<int, FeatureMatrix> out;
  for (const auto& [channel, spec] : specs) out.emplace(channel, channel_features(epochs, channel, spec, jobs));
  return out;
}

}  // namespace pcg
