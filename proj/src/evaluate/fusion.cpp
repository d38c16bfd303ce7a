#include <algorithm>
#include <cctype>

#include "pcg/error.hpp"
#include "pcg/evaluate.hpp"

namespace pcg {

FeatureMatrix feature_level_fuse(std::span<const FeatureMatrix> per_channel) {
  if (per_channel.empty()) throw DataError("feature-level fusion needs at least one channel");
  const FeatureMatrix& ref = per_channel.front();
  FeatureMatrix out;
  out.y = ref.y;
  out.subject_ids = ref.subject_ids;
  out.epoch_idx = ref.epoch_idx;
  std::vector<Matrix> blocks;
  for (const auto& ch : per_channel) {
    if (ch.subject_ids != ref.subject_ids || ch.epoch_idx != ref.epoch_idx || ch.y != ref.y) {
      throw DataError("row misalignment between channel feature matrices");
    }
    blocks.push_back(ch.x);
    out.columns.insert(out.columns.end(), ch.columns.begin(), ch.columns.end());
  }
  out.x = Matrix::hconcat(blocks);
  return out;
}

FusedDecision score_level_fuse(std::span<const double> probabilities) {
  if (probabilities.empty()) throw DataError("score-level fusion needs at least one probability");
  FusedDecision d;
  for (double p : probabilities) d.mean_probability += p;
  d.mean_probability /= static_cast<double>(probabilities.size());
  d.label = d.mean_probability >= 0.5 ? Label::cad : Label::normal;
  return d;
}

std::string_view to_string(FusionMode mode) {
  return mode == FusionMode::feature_level ? "feature" : "score";
}

FusionMode parse_fusion_mode(std::string_view token) {
  std::string t(token);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "feature" || t == "feature_level" || t == "feature-level") return FusionMode::feature_level;
  if (t == "score" || t == "score_level" || t == "score-level") return FusionMode::score_level;
  throw ConfigError("unknown fusion mode '" + t + "'");
}

}  // namespace pcg
