#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pcg/evaluate.hpp"

namespace pcg::detail {

/// Columns (ranked order prefix) and classifier chosen on one training set.
struct ColumnChoice {
  std::vector<std::size_t> columns;
  ClassifierSpec classifier;
  std::optional<double> tuned_c;
  std::optional<double> tuned_gamma;
};

ColumnChoice choose_columns(const FeatureMatrix& train, const CvConfig& cfg, const SelectionPlan& plan,
                            std::uint64_t seed);

struct EpochPredictions {
  std::vector<Label> labels;
  std::vector<double> probabilities;
};

EpochPredictions fit_predict(const FeatureMatrix& train, const FeatureMatrix& test, const ColumnChoice& choice,
                             const CvConfig& cfg);

double median(std::vector<double> values);

}  // namespace pcg::detail
