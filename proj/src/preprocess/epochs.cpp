#include <cmath>
#include <numeric>

#include "pcg/error.hpp"
#include "pcg/preprocess.hpp"

namespace pcg {

std::vector<Epoch> segment_epochs(const Recording& rec, std::span<const EpochSpan> spans, Label label,
                                  const SegmentOptions& options) {
  validate(rec);
  const std::size_t n = rec.num_samples();
  std::vector<Epoch> epochs;
  epochs.reserve(spans.size() * rec.num_channels());
  for (const auto& span : spans) {
    if (span.end_sample <= span.start_sample) throw DataError("end <= start for subject " + span.subject_id);
    if (span.end_sample > n) {
      throw DataError("span out of range: [" + std::to_string(span.start_sample) + ", " +
                      std::to_string(span.end_sample) + ") exceeds " + std::to_string(n) + " samples");
    }
    if (options.strict && (span.length() < kMinEpochSamples || span.length() > kMaxEpochSamples)) {
      throw DataError("epoch length " + std::to_string(span.length()) + " outside [2111, 5299] for subject " +
                      span.subject_id);
    }
    for (std::size_t c = 0; c < rec.num_channels(); ++c) {
      Epoch e;
      e.subject_id = span.subject_id;
      e.channel_id = static_cast<int>(c) + 1;
      e.epoch_idx = span.epoch_idx;
      e.label = label;
      const auto& ch = rec.channels[c];
      e.samples.assign(ch.begin() + static_cast<long>(span.start_sample),
                       ch.begin() + static_cast<long>(span.end_sample));
      epochs.push_back(std::move(e));
    }
  }
  return epochs;
}

std::vector<double> z_normalize(std::span<const double> x) {
  if (x.empty()) throw NumericError("zero variance: empty epoch");
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 0.0) || !std::isfinite(sd)) throw NumericError("zero variance epoch");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) / sd;
  // Second centering pass removes the residual rounding bias of the mean.
  const double residual = std::accumulate(out.begin(), out.end(), 0.0) / n;
  for (double& v : out) v -= residual;
  return out;
}

Epoch z_normalize(Epoch epoch) {
  epoch.samples = z_normalize(epoch.samples);
  return epoch;
}

std::vector<Epoch> preprocess_subject(const Recording& recording, std::span<const EpochSpan> spans, Label label,
                                      const PreprocessOptions& options, std::vector<PreprocessStage>* trace) {
  validate(recording);
  auto mark = [trace](PreprocessStage s) {
    if (trace) trace->push_back(s);
  };

  Recording resampled;
  resampled.subject_id = recording.subject_id;
  resampled.bit_depth = recording.bit_depth;
  resampled.fs_hz = options.target_fs_hz;
  for (const auto& ch : recording.channels) {
    mark(PreprocessStage::filter);
    auto filtered = lowpass_filter(ch, options.filter, recording.fs_hz);
    mark(PreprocessStage::resample);
    resampled.channels.push_back(resample(filtered, recording.fs_hz, options.target_fs_hz));
  }

  mark(PreprocessStage::segment);
  auto epochs = segment_epochs(resampled, spans, label, SegmentOptions{options.strict});
  for (auto& e : epochs) {
    mark(PreprocessStage::normalize);
    e = z_normalize(std::move(e));
  }
  return epochs;
}

}  // namespace pcg
