#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "csv.hpp"
#include "pcg/dataio.hpp"
#include "pcg/error.hpp"

namespace pcg {

namespace {

Cohort parse_cohort(const std::string& token) {
  std::string lower = csv::trim(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "train") return Cohort::train;
  if (lower == "heldout") return Cohort::heldout;
  throw DataError("unknown cohort token '" + token + "'");
}

}  // namespace

std::vector<ManifestEntry> DatasetManifest::cohort(Cohort c) const {
  std::vector<ManifestEntry> out;
  std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
               [c](const ManifestEntry& e) { return e.cohort == c; });
  return out;
}

DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir,
                               bool check_paths) {
  const csv::Table table = csv::read(in);
  const std::size_t c_id = table.require("subject_id");
  const std::size_t c_path = table.require("path");
  const std::size_t c_label = table.require("label");
  const std::size_t c_cohort = table.require("cohort");

  DatasetManifest manifest;
  std::set<std::string> seen;
  for (const auto& row : table.rows) {
    ManifestEntry e;
    e.subject_id = row[c_id];
    if (e.subject_id.empty()) throw DataError("empty subject_id");
    if (!seen.insert(e.subject_id).second) throw DataError("duplicate subject_id '" + e.subject_id + "'");
    std::filesystem::path p = row[c_path];
    e.path = p.is_relative() ? base_dir / p : p;
    e.label = parse_label(row[c_label]);
    e.cohort = parse_cohort(row[c_cohort]);
    if (check_paths && !std::filesystem::exists(e.path)) {
      throw DataError("manifest path does not exist: " + e.path.string());
    }
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  return parse_manifest(in, path.parent_path(), true);
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  const auto base = path.parent_path();
  out << "subject_id,path,label,cohort\n";
  for (const auto& e : manifest.entries) {
    auto rel = e.path.is_absolute() && !base.empty() ? std::filesystem::relative(e.path, base) : e.path;
    out << e.subject_id << ',' << rel.generic_string() << ',' << to_string(e.label) << ','
        << (e.cohort == Cohort::train ? "train" : "heldout") << '\n';
  }
}

}  // namespace pcg
