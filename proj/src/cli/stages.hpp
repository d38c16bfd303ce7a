#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcg/cli.hpp"

namespace pcg::cli {

/// Incremental SHA-256.
class Hasher {
 public:
  Hasher();
  ~Hasher();
  Hasher(const Hasher&) = delete;
  Hasher& operator=(const Hasher&) = delete;

  Hasher& update(std::string_view bytes);
  Hasher& update_file(const std::filesystem::path& path);
  std::string hex();

 private:
  void* ctx_;
};

std::string sha256_hex(std::string_view bytes);

/// Cache file: "PCGCACHE", u32 version, u64 header length, JSON header,
/// then the raw float64 payload.
struct CacheBlob {
  nlohmann::json header;
  std::vector<double> payload;
};

void write_cache(const std::filesystem::path& path, const nlohmann::json& header, std::span<const double> payload);

/// Returns the blob only when the file exists, parses, and its header "key"
/// equals `key`. A present but mismatching file is reported and ignored.
std::optional<CacheBlob> read_cache(const std::filesystem::path& path, const std::string& key);

struct StageResult {
  bool cache_hit = false;
  std::filesystem::path cache_file;
  std::string key;
};

struct Inputs {
  DatasetManifest manifest;
  EpochAnnotations annotations;
};

/// Loads manifest and annotations named by the config. A missing manifest
/// or annotation file is a config error.
Inputs load_inputs(const PipelineConfig& cfg);

std::vector<Epoch> cohort_epochs(const PipelineConfig& cfg, const Inputs& in, Cohort cohort, StageResult* info = nullptr);

std::map<int, FeatureMatrix> cohort_features(const PipelineConfig& cfg, const Inputs& in, Cohort cohort,
                                             std::span<const int> channels, std::vector<StageResult>* info = nullptr);

}  // namespace pcg::cli
