#include <algorithm>
#include <fstream>
#include <map>

#include "csv.hpp"
#include "pcg/dataio.hpp"
#include "pcg/error.hpp"

namespace pcg {

std::vector<EpochSpan> EpochAnnotations::for_subject(const std::string& subject_id) const {
  std::vector<EpochSpan> out;
  for (const auto& s : spans) {
    if (s.subject_id == subject_id) out.push_back(s);
  }
  std::sort(out.begin(), out.end(),
            [](const EpochSpan& a, const EpochSpan& b) { return a.start_sample < b.start_sample; });
  return out;
}

void validate(const EpochAnnotations& ann, bool strict) {
  std::map<std::string, std::vector<EpochSpan>> by_subject;
  for (const auto& s : ann.spans) {
    if (s.epoch_idx < 0 || s.epoch_idx >= kEpochsPerSubject) {
      throw DataError("epoch_idx " + std::to_string(s.epoch_idx) + " outside 0..2 for subject " + s.subject_id);
    }
    if (s.end_sample <= s.start_sample) throw DataError("end <= start for subject " + s.subject_id);
    by_subject[s.subject_id].push_back(s);
  }
  for (auto& [id, spans] : by_subject) {
    std::sort(spans.begin(), spans.end(),
              [](const EpochSpan& a, const EpochSpan& b) { return a.start_sample < b.start_sample; });
    for (std::size_t i = 1; i < spans.size(); ++i) {
      if (spans[i].start_sample < spans[i - 1].end_sample) throw DataError("overlapping spans for subject " + id);
      if (spans[i].epoch_idx <= spans[i - 1].epoch_idx) {
        throw DataError("spans not time-ordered by epoch_idx for subject " + id);
      }
    }
    if (strict && spans.size() != static_cast<std::size_t>(kEpochsPerSubject)) {
      throw DataError("expected 3 epochs for subject " + id + ", found " + std::to_string(spans.size()));
    }
  }
}

EpochAnnotations parse_annotations(std::istream& in, bool strict) {
  const csv::Table table = csv::read(in);
  const std::size_t c_id = table.require("subject_id");
  const std::size_t c_idx = table.require("epoch_idx");
  const std::size_t c_start = table.require("start_sample");
  const std::size_t c_end = table.require("end_sample");

  EpochAnnotations ann;
  for (const auto& row : table.rows) {
    EpochSpan s;
    s.subject_id = row[c_id];
    s.epoch_idx = static_cast<int>(csv::parse_integer(row[c_idx], "epoch_idx"));
    const long long start = csv::parse_integer(row[c_start], "start_sample");
    const long long end = csv::parse_integer(row[c_end], "end_sample");
    if (start < 0 || end < 0) throw DataError("negative sample index for subject " + s.subject_id);
    s.start_sample = static_cast<std::size_t>(start);
    s.end_sample = static_cast<std::size_t>(end);
    ann.spans.push_back(std::move(s));
  }
  validate(ann, strict);
  return ann;
}

EpochAnnotations load_annotations(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open annotations " + path.string());
  return parse_annotations(in, strict);
}

void write_annotations(const EpochAnnotations& ann, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << "subject_id,epoch_idx,start_sample,end_sample\n";
  for (const auto& s : ann.spans) {
    out << s.subject_id << ',' << s.epoch_idx << ',' << s.start_sample << ',' << s.end_sample << '\n';
  }
}

}  // namespace pcg
