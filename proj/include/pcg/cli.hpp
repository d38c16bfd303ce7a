#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcg/evaluate.hpp"
#include "pcg/features.hpp"
#include "pcg/synth.hpp"

namespace pcg::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

struct Paths {
  std::filesystem::path dataset_dir;  // synth output
  std::filesystem::path manifest;
  std::filesystem::path annotations;
  std::filesystem::path output_dir = "out";
  std::filesystem::path cache_dir;    // defaults to output_dir/cache
};

struct SynthSettings {
  std::size_t n_per_class = 40;
  std::size_t n_heldout_per_class = 0;
  SynthParams params;
};

struct FusionSettings {
  FusionMode mode = FusionMode::feature_level;
  std::vector<int> channels{2, 3, 6, 7};
  std::vector<int> search_channels;             // empty = every extracted channel
  std::vector<std::vector<int>> search_family;  // empty = all subsets
};

struct PipelineConfig {
  Paths paths;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  bool strict = false;  // --strict turns on the investigated-grid and epoch checks
  PreprocessOptions preprocess;
  FeatureSpec default_features;
  std::map<int, FeatureSpec> channel_features;  // explicit per-channel settings
  FusionSettings fusion;
  SelectionPlan selection;
  CvConfig cv;
  SynthSettings synth;

  /// Channels to extract: the explicit ones, else 1..7.
  std::vector<int> extracted_channels() const;
  FeatureSpec spec_for(int channel) const;
};

/// Parses and validates a config document. Relative paths resolve against
/// base_dir. Unknown keys are rejected.
PipelineConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

/// Fully resolved config, every default spelled out.
nlohmann::json to_json(const PipelineConfig& cfg);

/// Entry point used by the pcg executable. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pcg::cli
