#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pcg/types.hpp"

namespace pcg {

/// One subject's synchronous multi-channel recording.
/// Samples are in normalized full-scale units, [-1, 1].
struct Recording {
  std::string subject_id;
  std::vector<std::vector<double>> channels;  // [n_channels][n_samples]
  double fs_hz = 0.0;
  int bit_depth = 24;

  std::size_t num_channels() const { return channels.size(); }
  std::size_t num_samples() const { return channels.empty() ? 0 : channels.front().size(); }
};

/// Throws DataError when the recording breaks the shape invariants
/// (1..7 equal-length channels, fs > 0).
void validate(const Recording& rec);

/// Reads a multitrack RIFF/WAVE file (16/24-bit integer PCM or 32-bit float,
/// plain or WAVE_FORMAT_EXTENSIBLE). Integer samples are divided by
/// 2^(bit_depth-1). A "rate" chunk carrying the exact rate as a float64
/// overrides the integer header rate, so non-integer rates survive storage.
Recording load_recording(const std::filesystem::path& path);
Recording read_recording(std::istream& in, std::string subject_id);

/// Writes the recording at its bit depth (16, 24 or 32 = float).
/// Samples are rounded to the integer grid and clamped.
void write_recording(const Recording& rec, const std::filesystem::path& path);
void write_recording(const Recording& rec, std::ostream& out);

enum class Cohort { train, heldout };

struct ManifestEntry {
  std::string subject_id;
  std::filesystem::path path;
  Label label = Label::normal;
  Cohort cohort = Cohort::train;

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  std::vector<ManifestEntry> cohort(Cohort c) const;
};

/// Parses a manifest CSV (header subject_id,path,label,cohort, any column
/// order). Relative paths resolve against base_dir. With check_paths, every
/// referenced file must exist.
DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir,
                               bool check_paths);
DatasetManifest load_manifest(const std::filesystem::path& path);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

struct EpochSpan {
  std::string subject_id;
  int epoch_idx = 0;
  std::size_t start_sample = 0;  // inclusive, at the post-resample rate
  std::size_t end_sample = 0;    // exclusive

  std::size_t length() const { return end_sample - start_sample; }
  bool operator==(const EpochSpan&) const = default;
};

struct EpochAnnotations {
  std::vector<EpochSpan> spans;

  /// Spans of one subject in time order.
  std::vector<EpochSpan> for_subject(const std::string& subject_id) const;
};

inline constexpr int kEpochsPerSubject = 3;

/// Checks ordering/overlap/index rules; in strict mode each subject must
/// have exactly three spans.
void validate(const EpochAnnotations& ann, bool strict);

EpochAnnotations parse_annotations(std::istream& in, bool strict);
EpochAnnotations load_annotations(const std::filesystem::path& path, bool strict = true);
void write_annotations(const EpochAnnotations& ann, const std::filesystem::path& path);

}  // namespace pcg
