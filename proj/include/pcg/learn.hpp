#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcg/types.hpp"

namespace pcg {

// ---------------------------------------------------------------------------
// Metrics

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  void add(Label truth, Label predicted);
  Confusion& operator+=(const Confusion& o);
  bool operator==(const Confusion&) const = default;
};

/// CAD is the positive class. Undefined ratios are reported as 0 with the
/// matching flag cleared.
struct Metrics {
  double sens = 0.0, spec = 0.0, acc = 0.0, f1 = 0.0, precision = 0.0;
  Confusion confusion;
  bool sens_defined = true, spec_defined = true, precision_defined = true, f1_defined = true;
};

Metrics compute_metrics(const Confusion& c);

// ---------------------------------------------------------------------------
// Kernels and SVM

enum class KernelKind { rbf, linear, poly3, sigmoid };

std::string_view to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view token);

struct KernelSpec {
  KernelKind kind = KernelKind::rbf;
  /// Unset means 1 / n_features at training time.
  std::optional<double> gamma;
  double coef0 = 0.0;
  double c = 1.0;
};

/// K(a, b) for a fully resolved kernel (gamma set).
double kernel_value(const KernelSpec& k, std::span<const double> a, std::span<const double> b);

struct SvmTrainOptions {
  double tolerance = 1e-3;
  std::size_t max_iterations = 10'000'000;
  /// Records the dual objective after every SMO step.
  bool record_objective = false;
};

struct SvmModel {
  KernelSpec kernel;  // gamma always resolved
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;
  Matrix support_vectors;           // in scaled feature space
  std::vector<double> dual_coefs;   // alpha_i * y_i, y = +1 for CAD
  double bias = 0.0;

  std::size_t num_features() const { return feature_mean.size(); }
};

struct SvmTrainResult {
  SvmModel model;
  std::vector<double> alpha;  // one per training row
  std::size_t iterations = 0;
  std::vector<double> objective_trace;
};

/// C-SVC dual solved by SMO with second-order working-set selection.
/// Features are standardized with training statistics before solving.
SvmTrainResult svm_train_detailed(const Matrix& x, std::span<const Label> y, const KernelSpec& kernel,
                                  const SvmTrainOptions& options = {});
SvmModel svm_train(const Matrix& x, std::span<const Label> y, const KernelSpec& kernel,
                   const SvmTrainOptions& options = {});

/// d = sum_i alpha_i y_i K(s_i, x) + b on the raw (unscaled) feature vector.
double svm_decision(const SvmModel& model, std::span<const double> x);
/// CAD iff d >= 0.
Label svm_predict(const SvmModel& model, std::span<const double> x);

struct DualityGap {
  double primal = 0.0;
  double dual = 0.0;
  double gap() const { return primal - dual; }
};

/// Primal and dual objective values of a trained model on its training set.
DualityGap duality_gap(const SvmTrainResult& result, const Matrix& x, std::span<const Label> y);

void save_model(const SvmModel& model, std::ostream& out);
SvmModel load_model(std::istream& in);

// ---------------------------------------------------------------------------
// Probability mapping

/// p = 1 / (1 + exp(a d + b)); the default is the plain logistic link.
struct ProbabilityMap {
  double a = -1.0;
  double b = 0.0;
};

double decision_to_probability(double d, const ProbabilityMap& map = {});

/// Platt's sigmoid fit of decision values to labels (Newton with
/// backtracking, regularized targets).
ProbabilityMap fit_platt(std::span<const double> decisions, std::span<const Label> labels);

// ---------------------------------------------------------------------------
// k-NN

enum class DistanceMetric { euclidean, cosine, cityblock, correlation };

std::string_view to_string(DistanceMetric metric);
DistanceMetric parse_distance_metric(std::string_view token);

double distance(DistanceMetric metric, std::span<const double> a, std::span<const double> b);

/// Indices of the k nearest rows, nearest first; equal distances keep the
/// lower index first.
std::vector<std::size_t> nearest_neighbors(const Matrix& train, std::span<const double> query, std::size_t k,
                                           DistanceMetric metric);

/// Fraction of CAD labels among the k nearest neighbours.
double knn_cad_fraction(const Matrix& train_x, std::span<const Label> train_y, std::span<const double> query,
                        int k, DistanceMetric metric);

/// Majority label among the k nearest; vote ties go to CAD.
Label knn_predict(const Matrix& train_x, std::span<const Label> train_y, std::span<const double> query, int k = 11,
                  DistanceMetric metric = DistanceMetric::euclidean);

// ---------------------------------------------------------------------------
// Rank-sum test

struct RankSumResult {
  double statistic = 0.0;  // rank sum of the first sample (midranks)
  double z = 0.0;
  double p_value = 1.0;
  bool exact = false;
};

/// Samples at or below this combined size use the exact permutation
/// distribution of the midrank sum; larger ones the tie-corrected normal
/// approximation with continuity correction.
inline constexpr std::size_t kRankSumExactLimit = 50;

/// Two-sided Wilcoxon rank-sum test.
RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b);

}  // namespace pcg
