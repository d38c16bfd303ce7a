#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>

#include "pcg/error.hpp"
#include "pcg/selection.hpp"

namespace pcg {

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out;
  out.x = x.select_rows(rows);
  out.columns = columns;
  for (std::size_t r : rows) {
    out.y.push_back(y[r]);
    out.subject_ids.push_back(subject_ids[r]);
    out.epoch_idx.push_back(epoch_idx[r]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_cols(std::span<const std::size_t> cols) const {
  FeatureMatrix out;
  out.x = x.select_cols(cols);
  out.y = y;
  out.subject_ids = subject_ids;
  out.epoch_idx = epoch_idx;
  for (std::size_t c : cols) out.columns.push_back(columns[c]);
  return out;
}

void validate(const FeatureMatrix& fm) {
  const std::size_t n = fm.x.rows();
  if (fm.y.size() != n || fm.subject_ids.size() != n || fm.epoch_idx.size() != n) {
    throw DataError("feature matrix row metadata does not match row count");
  }
  if (fm.columns.size() != fm.x.cols()) throw DataError("feature matrix column provenance does not match column count");
  for (double v : fm.x.data()) {
    if (!std::isfinite(v)) throw NumericError("non-finite feature value");
  }
  std::map<std::string, Label> label_of;
  for (std::size_t r = 0; r < n; ++r) {
    auto [it, inserted] = label_of.emplace(fm.subject_ids[r], fm.y[r]);
    if (!inserted && it->second != fm.y[r]) throw DataError("subject " + fm.subject_ids[r] + " has mixed labels");
  }
}

std::string_view to_string(RankingMethod method) {
  switch (method) {
    case RankingMethod::none: return "none";
    case RankingMethod::mrmr: return "mrmr";
    case RankingMethod::relieff: return "relieff";
  }
  return "none";
}

RankingMethod parse_ranking_method(std::string_view token) {
  std::string t(token);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "none") return RankingMethod::none;
  if (t == "mrmr") return RankingMethod::mrmr;
  if (t == "relieff") return RankingMethod::relieff;
  throw ConfigError("unknown ranking method '" + t + "'");
}

RankedFeatureSet identity_ranking(std::size_t n_features) {
  RankedFeatureSet r;
  r.order.resize(n_features);
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  r.scores.assign(n_features, 0.0);
  r.method = RankingMethod::none;
  return r;
}

RankedFeatureSet rank_features(const FeatureMatrix& fm, RankingMethod method, int mrmr_bins, int relieff_k) {
  switch (method) {
    case RankingMethod::mrmr: return mrmr_rank(fm, mrmr_bins);
    case RankingMethod::relieff: return relieff_rank(fm, relieff_k);
    case RankingMethod::none: break;
  }
  if (fm.cols() == 0) throw DataError("empty feature matrix");
  return identity_ranking(fm.cols());
}

}  // namespace pcg
