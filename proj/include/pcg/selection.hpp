#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pcg/learn.hpp"
#include "pcg/types.hpp"

namespace pcg {

/// Provenance of one feature column.
struct ColumnInfo {
  int channel = 0;
  std::string description;

  bool operator==(const ColumnInfo&) const = default;
};

/// Rows are epochs, columns are features.
struct FeatureMatrix {
  Matrix x;
  std::vector<Label> y;
  std::vector<std::string> subject_ids;
  std::vector<int> epoch_idx;
  std::vector<ColumnInfo> columns;

  std::size_t rows() const { return x.rows(); }
  std::size_t cols() const { return x.cols(); }

  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  FeatureMatrix select_cols(std::span<const std::size_t> cols) const;
};

/// Shape, finiteness, and per-subject label consistency.
void validate(const FeatureMatrix& fm);

enum class RankingMethod { none, mrmr, relieff };

std::string_view to_string(RankingMethod method);
RankingMethod parse_ranking_method(std::string_view token);

struct RankedFeatureSet {
  std::vector<std::size_t> order;  // best first
  std::vector<double> scores;      // indexed by column
  RankingMethod method = RankingMethod::none;
};

/// Identity ranking with zero scores.
RankedFeatureSet identity_ranking(std::size_t n_features);

/// Equal-frequency discretization into at most `bins` levels. Tied values
/// always share a level.
std::vector<int> discretize_equal_frequency(std::span<const double> values, int bins);

/// Plug-in mutual information in bits between two discrete sequences.
double mutual_information(std::span<const int> a, std::span<const int> b);

/// Greedy mutual-information-difference ranking: the first pick maximizes
/// I(x; y), each next pick maximizes I(x; y) minus the mean I(x; s) over
/// the already selected s. scores[j] is the criterion value when j was picked.
RankedFeatureSet mrmr_rank(const FeatureMatrix& fm, int bins = 10);

/// ReliefF weights with k rank-weighted nearest hits and misses per instance.
/// Neighbours are found in Euclidean distance over z-scored features;
/// per-feature differences are range-normalized; weights are averaged over
/// instances. k is clamped to (smallest class size - 1).
RankedFeatureSet relieff_rank(const FeatureMatrix& fm, int k = 100);

RankedFeatureSet rank_features(const FeatureMatrix& fm, RankingMethod method, int mrmr_bins = 10,
                               int relieff_k = 100);

/// Candidate dimensions {step, 2 step, ...} up to D, plus D itself.
std::vector<std::size_t> search_dimensions(std::size_t n_features, std::size_t step = 2,
                                           std::size_t max_dim = 0);

struct SearchResult {
  std::size_t best_dim = 0;
  Metrics best_metrics;
  std::vector<std::pair<std::size_t, Metrics>> trace;
};

/// Maps the leading columns of a ranking to subject-level metrics.
using SubsetEvaluator = std::function<Metrics(std::span<const std::size_t> columns)>;

/// Evaluates every candidate dimension and keeps the one with the highest
/// subject accuracy; ties go to the smaller dimension.
SearchResult incremental_search(const RankedFeatureSet& ranking, const SubsetEvaluator& evaluator,
                                std::size_t step = 2, std::size_t max_dim = 0);

}  // namespace pcg
