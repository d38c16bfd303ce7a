#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pcg/learn.hpp"
#include "pcg/selection.hpp"

namespace pcg {

struct KnnSpec {
  int k = 11;
  DistanceMetric metric = DistanceMetric::euclidean;
};

using ClassifierSpec = std::variant<KernelSpec, KnnSpec>;

enum class ProbabilityMode { logistic, platt };
enum class VoteMode { strict, permissive };

struct KnnReference {
  Matrix x;
  std::vector<Label> y;
  KnnSpec spec;
};

/// Kernel SVM or k-NN reference set plus the decision-to-probability map.
struct TrainedModel {
  std::variant<SvmModel, KnnReference> model;
  ProbabilityMap probability;
};

TrainedModel train_classifier(const ClassifierSpec& spec, const Matrix& x, std::span<const Label> y,
                              ProbabilityMode probability = ProbabilityMode::logistic);
/// SVM: mapped decision value. k-NN: fraction of CAD neighbours.
double cad_probability(const TrainedModel& model, std::span<const double> x);
/// SVM: d >= 0. k-NN: majority with ties to CAD.
Label predict_label(const TrainedModel& model, std::span<const double> x);

struct SelectionPlan {
  RankingMethod method = RankingMethod::relieff;
  bool search = false;
  std::size_t step = 2;
  std::size_t max_dim = 0;                // 0 = all features
  std::optional<std::size_t> fixed_dim;   // used when search is off; unset = all
  int mrmr_bins = 10;
  int relieff_k = 100;
};

struct CvConfig {
  int k = 5;
  int iterations = 20;
  std::uint64_t rng_seed = 0;
  ClassifierSpec classifier = KernelSpec{};
  bool grid_search = false;
  ProbabilityMode probability = ProbabilityMode::logistic;
  VoteMode vote = VoteMode::strict;
  unsigned jobs = 1;
};

void validate(const CvConfig& cfg);

// ---------------------------------------------------------------------------
// Folds and voting

struct FoldAssignment {
  int k = 0;
  std::vector<std::string> subjects;  // first-appearance order
  std::vector<Label> subject_labels;
  std::vector<int> subject_fold;
  std::vector<int> row_fold;          // fold of every input row
};

/// Subjects are shuffled per class by a generator seeded with `seed`, then
/// dealt round-robin into k folds. Every row inherits its subject's fold.
FoldAssignment stratified_group_kfold(std::span<const std::string> subject_ids, std::span<const Label> labels, int k,
                                      std::uint64_t seed);

/// Strict: exactly three epochs, label held by at least two.
/// Permissive: any odd count, simple majority.
Label majority_vote(std::span<const Label> epoch_labels, VoteMode mode = VoteMode::strict);

struct SubjectVote {
  std::string subject_id;
  Label truth = Label::normal;
  Label predicted = Label::normal;
  std::vector<Label> epoch_predictions;
  double mean_probability = 0.0;
};

/// Groups rows by subject (first-appearance order) and votes each group.
std::vector<SubjectVote> vote_subjects(std::span<const std::string> subject_ids, std::span<const Label> truth,
                                       std::span<const Label> predicted, std::span<const double> probabilities,
                                       VoteMode mode);

// ---------------------------------------------------------------------------
// Cross-validation

struct MetricSummary {
  double sens = 0.0, spec = 0.0, acc = 0.0, f1 = 0.0;
};

/// Arithmetic mean of each metric.
MetricSummary mean_metrics(std::span<const Metrics> metrics);

struct ModelTrace {
  int iteration = 0;
  int fold = 0;
  std::size_t dim = 0;
  std::vector<std::string> train_subjects;
  std::vector<std::string> test_subjects;
  Metrics epoch;
  Metrics subject;
  std::optional<double> tuned_c;
  std::optional<double> tuned_gamma;
};

struct EvaluationReport {
  MetricSummary epoch_metrics;
  MetricSummary subject_metrics;
  Confusion epoch_pooled;
  Confusion subject_pooled;
  std::vector<ModelTrace> models;  // ordered by (iteration, fold)
  double fd_median = 0.0;
  std::size_t n_features = 0;
  std::size_t leakage_violations = 0;
  CvConfig config;
  SelectionPlan plan;
};

/// iterations x k train/test splits. Per split: rank on the training rows,
/// pick the dimension (incremental search on an inner subject-grouped
/// validation fold, or the plan's fixed dimension), train, predict the test
/// epochs, vote subjects.
EvaluationReport cross_validate(const FeatureMatrix& fm, const CvConfig& cfg, const SelectionPlan& plan);

/// Same protocol with one classifier per channel matrix; per-epoch CAD
/// probabilities are averaged across channels before voting.
EvaluationReport cross_validate_score_fusion(std::span<const FeatureMatrix> channels, const CvConfig& cfg,
                                             const SelectionPlan& plan);

// ---------------------------------------------------------------------------
// Fusion and channel search

/// Column-wise concatenation of row-aligned (subject, epoch) matrices.
FeatureMatrix feature_level_fuse(std::span<const FeatureMatrix> per_channel);

struct FusedDecision {
  double mean_probability = 0.0;
  Label label = Label::normal;
};

/// Mean probability; CAD iff mean >= 0.5.
FusedDecision score_level_fuse(std::span<const double> probabilities);

enum class FusionMode { feature_level, score_level };

std::string_view to_string(FusionMode mode);
FusionMode parse_fusion_mode(std::string_view token);

/// Every non-empty subset of `channels`, ordered by size then lexicographically.
std::vector<std::vector<int>> all_channel_subsets(std::span<const int> channels);

struct CombinationRow {
  std::vector<int> channels;
  MetricSummary epoch;
  MetricSummary subject;
  double fd_median = 0.0;
};

struct CombinationTable {
  std::vector<CombinationRow> rows;
  /// Row index of the best subset for each cardinality (highest subject
  /// accuracy, then F1, then enumeration order).
  std::map<std::size_t, std::size_t> best_by_size;
};

EvaluationReport evaluate_combination(const std::map<int, FeatureMatrix>& per_channel, std::span<const int> channels,
                                      const CvConfig& cfg, const SelectionPlan& plan, FusionMode mode);

/// Evaluates each subset in `family` (all subsets of the available channels
/// when empty) from the cached per-channel matrices.
CombinationTable channel_combination_search(const std::map<int, FeatureMatrix>& per_channel, const CvConfig& cfg,
                                            const SelectionPlan& plan, FusionMode mode,
                                            std::vector<std::vector<int>> family = {});

// ---------------------------------------------------------------------------
// Held-out prediction

struct SubjectPrediction {
  std::string subject_id;
  Label label = Label::normal;
  Label truth = Label::normal;  // as recorded in the held-out matrix
  std::vector<Label> epoch_labels;
  std::vector<double> epoch_probabilities;
  double mean_probability = 0.0;
};

/// Trains on every training row (ranking and dimension choice included) and
/// votes one label per held-out subject. Column provenance must match.
std::vector<SubjectPrediction> train_full_and_predict(const FeatureMatrix& train, const FeatureMatrix& heldout,
                                                      const CvConfig& cfg, const SelectionPlan& plan);

}  // namespace pcg
