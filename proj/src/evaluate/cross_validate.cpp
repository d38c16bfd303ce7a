#include <algorithm>
#include <array>
#include <set>

#include "pcg/error.hpp"
#include "pcg/parallel.hpp"
#include "pcg/rng.hpp"
#include "pipeline.hpp"

namespace pcg {

namespace detail {

namespace {

constexpr std::array<double, 4> kGridC = {0.1, 1.0, 10.0, 100.0};
constexpr std::array<double, 4> kGridGammaScale = {0.001, 0.01, 0.1, 1.0};

std::vector<std::size_t> rows_where(const std::vector<int>& folds, int fold, bool equal) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < folds.size(); ++r) {
    if ((folds[r] == fold) == equal) rows.push_back(r);
  }
  return rows;
}

}  // namespace

EpochPredictions fit_predict(const FeatureMatrix& train, const FeatureMatrix& test, const ColumnChoice& choice,
                             const CvConfig& cfg) {
  const Matrix xtr = train.x.select_cols(choice.columns);
  const Matrix xte = test.x.select_cols(choice.columns);
  const TrainedModel model = train_classifier(choice.classifier, xtr, train.y, cfg.probability);
  EpochPredictions out;
  out.labels.reserve(xte.rows());
  out.probabilities.reserve(xte.rows());
  for (std::size_t i = 0; i < xte.rows(); ++i) {
    out.labels.push_back(predict_label(model, xte.row(i)));
    out.probabilities.push_back(cad_probability(model, xte.row(i)));
  }
  return out;
}

ColumnChoice choose_columns(const FeatureMatrix& train, const CvConfig& cfg, const SelectionPlan& plan,
                            std::uint64_t seed) {
  const RankedFeatureSet ranking = rank_features(train, plan.method, plan.mrmr_bins, plan.relieff_k);
  const std::size_t d = ranking.order.size();

  ColumnChoice choice;
  choice.classifier = cfg.classifier;
  const bool tune = cfg.grid_search && std::holds_alternative<KernelSpec>(cfg.classifier);
  if (!plan.search && !tune) {
    const std::size_t dim = std::clamp<std::size_t>(plan.fixed_dim.value_or(d), 1, d);
    choice.columns.assign(ranking.order.begin(), ranking.order.begin() + static_cast<long>(dim));
    return choice;
  }

  // Inner subject-grouped validation split carved from the training rows.
  const FoldAssignment inner = stratified_group_kfold(train.subject_ids, train.y, cfg.k, seed);
  const auto val_rows = rows_where(inner.row_fold, 0, true);
  const auto fit_rows = rows_where(inner.row_fold, 0, false);
  const FeatureMatrix fit = train.select_rows(fit_rows);
  const FeatureMatrix val = train.select_rows(val_rows);

  auto evaluate_with = [&](const ClassifierSpec& spec, std::span<const std::size_t> cols) {
    ColumnChoice trial;
    trial.columns.assign(cols.begin(), cols.end());
    trial.classifier = spec;
    const auto pred = fit_predict(fit, val, trial, cfg);
    const auto votes = vote_subjects(val.subject_ids, val.y, pred.labels, pred.probabilities, cfg.vote);
    Confusion c;
    for (const auto& v : votes) c.add(v.truth, v.predicted);
    return compute_metrics(c);
  };

  std::size_t dim = std::clamp<std::size_t>(plan.fixed_dim.value_or(d), 1, d);
  if (plan.search) {
    const auto result = incremental_search(
        ranking, [&](std::span<const std::size_t> cols) { return evaluate_with(cfg.classifier, cols); }, plan.step,
        plan.max_dim);
    dim = result.best_dim;
  }
  choice.columns.assign(ranking.order.begin(), ranking.order.begin() + static_cast<long>(dim));

  if (tune) {
    const auto base = std::get<KernelSpec>(cfg.classifier);
    double best_acc = -1.0;
    for (double c : kGridC) {
      for (double g : kGridGammaScale) {
        KernelSpec spec = base;
        spec.c = c;
        spec.gamma = g / static_cast<double>(dim);
        const double acc = evaluate_with(spec, choice.columns).acc;
        if (acc > best_acc) {
          best_acc = acc;
          choice.classifier = spec;
          choice.tuned_c = c;
          choice.tuned_gamma = *spec.gamma;
        }
      }
    }
  }
  return choice;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

namespace {

struct SplitPlan {
  int iteration = 0;
  int fold = 0;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  std::uint64_t inner_seed = 0;
};

std::vector<SplitPlan> plan_splits(const FeatureMatrix& fm, const CvConfig& cfg) {
  std::vector<SplitPlan> splits;
  for (int it = 0; it < cfg.iterations; ++it) {
    const std::uint64_t seed = cfg.rng_seed + static_cast<std::uint64_t>(it);
    const FoldAssignment fa = stratified_group_kfold(fm.subject_ids, fm.y, cfg.k, seed);
    for (int f = 0; f < cfg.k; ++f) {
      SplitPlan s;
      s.iteration = it;
      s.fold = f;
      for (std::size_t r = 0; r < fa.row_fold.size(); ++r) (fa.row_fold[r] == f ? s.test_rows : s.train_rows).push_back(r);
      s.inner_seed = substream_seed(seed, static_cast<std::uint64_t>(f));
      splits.push_back(std::move(s));
    }
  }
  return splits;
}

std::vector<std::string> unique_subjects(const FeatureMatrix& fm, std::span<const std::size_t> rows) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (std::size_t r : rows) {
    if (seen.insert(fm.subject_ids[r]).second) out.push_back(fm.subject_ids[r]);
  }
  return out;
}

void check_disjoint(const ModelTrace& t) {
  const std::set<std::string> train(t.train_subjects.begin(), t.train_subjects.end());
  for (const auto& s : t.test_subjects) {
    if (train.count(s)) {
      throw NumericError("subject leakage: " + s + " in train and test of iteration " + std::to_string(t.iteration) +
                         " fold " + std::to_string(t.fold));
    }
  }
}

void score_trace(ModelTrace& trace, const FeatureMatrix& test, const std::vector<Label>& labels,
                 const std::vector<double>& probabilities, VoteMode vote) {
  Confusion epoch;
  for (std::size_t i = 0; i < labels.size(); ++i) epoch.add(test.y[i], labels[i]);
  Confusion subject;
  for (const auto& v : vote_subjects(test.subject_ids, test.y, labels, probabilities, vote)) {
    subject.add(v.truth, v.predicted);
  }
  trace.epoch = compute_metrics(epoch);
  trace.subject = compute_metrics(subject);
}

EvaluationReport summarize(std::vector<ModelTrace> traces, const CvConfig& cfg, const SelectionPlan& plan,
                           std::size_t n_features) {
  EvaluationReport report;
  report.config = cfg;
  report.plan = plan;
  report.n_features = n_features;
  std::vector<Metrics> epoch, subject;
  std::vector<double> dims;
  for (const auto& t : traces) {
    epoch.push_back(t.epoch);
    subject.push_back(t.subject);
    report.epoch_pooled += t.epoch.confusion;
    report.subject_pooled += t.subject.confusion;
    dims.push_back(static_cast<double>(t.dim));
  }
  report.epoch_metrics = mean_metrics(epoch);
  report.subject_metrics = mean_metrics(subject);
  report.fd_median = detail::median(dims);
  for (const auto& t : traces) {
    const std::set<std::string> train(t.train_subjects.begin(), t.train_subjects.end());
    for (const auto& s : t.test_subjects) report.leakage_violations += train.count(s);
  }
  report.models = std::move(traces);
  return report;
}

}  // namespace

EvaluationReport cross_validate(const FeatureMatrix& fm, const CvConfig& cfg, const SelectionPlan& plan) {
  validate(fm);
  validate(cfg);
  if (fm.cols() == 0) throw DataError("empty feature matrix");
  const auto splits = plan_splits(fm, cfg);
  std::vector<ModelTrace> traces(splits.size());

  parallel_for(splits.size(), cfg.jobs, [&](std::size_t s) {
    const SplitPlan& sp = splits[s];
    ModelTrace& trace = traces[s];
    trace.iteration = sp.iteration;
    trace.fold = sp.fold;
    trace.train_subjects = unique_subjects(fm, sp.train_rows);
    trace.test_subjects = unique_subjects(fm, sp.test_rows);
    check_disjoint(trace);

    const FeatureMatrix train = fm.select_rows(sp.train_rows);
    const FeatureMatrix test = fm.select_rows(sp.test_rows);
    const auto choice = detail::choose_columns(train, cfg, plan, sp.inner_seed);
    trace.dim = choice.columns.size();
    trace.tuned_c = choice.tuned_c;
    trace.tuned_gamma = choice.tuned_gamma;
    const auto pred = detail::fit_predict(train, test, choice, cfg);
    score_trace(trace, test, pred.labels, pred.probabilities, cfg.vote);
  });

  return summarize(std::move(traces), cfg, plan, fm.cols());
}

EvaluationReport cross_validate_score_fusion(std::span<const FeatureMatrix> channels, const CvConfig& cfg,
                                             const SelectionPlan& plan) {
  if (channels.empty()) throw DataError("score-level fusion needs at least one channel");
  validate(cfg);
  const FeatureMatrix& ref = channels.front();
  std::size_t total_features = 0;
  for (const auto& ch : channels) {
    validate(ch);
    if (ch.subject_ids != ref.subject_ids || ch.epoch_idx != ref.epoch_idx) {
      throw DataError("row misalignment between channel feature matrices");
    }
    total_features += ch.cols();
  }
  const auto splits = plan_splits(ref, cfg);
  std::vector<ModelTrace> traces(splits.size());

  parallel_for(splits.size(), cfg.jobs, [&](std::size_t s) {
    const SplitPlan& sp = splits[s];
    ModelTrace& trace = traces[s];
    trace.iteration = sp.iteration;
    trace.fold = sp.fold;
    trace.train_subjects = unique_subjects(ref, sp.train_rows);
    trace.test_subjects = unique_subjects(ref, sp.test_rows);
    check_disjoint(trace);

    std::vector<std::vector<double>> probs;
    FeatureMatrix test_ref;
    for (std::size_t c = 0; c < channels.size(); ++c) {
      const FeatureMatrix train = channels[c].select_rows(sp.train_rows);
      const FeatureMatrix test = channels[c].select_rows(sp.test_rows);
      const auto choice =
          detail::choose_columns(train, cfg, plan, substream_seed(sp.inner_seed, static_cast<std::uint64_t>(c)));
      trace.dim += choice.columns.size();
      probs.push_back(detail::fit_predict(train, test, choice, cfg).probabilities);
      if (c == 0) test_ref = test;
    }
    std::vector<Label> labels(sp.test_rows.size());
    std::vector<double> fused(sp.test_rows.size());
    std::vector<double> per_epoch(channels.size());
    for (std::size_t i = 0; i < sp.test_rows.size(); ++i) {
      for (std::size_t c = 0; c < channels.size(); ++c) per_epoch[c] = probs[c][i];
      const auto decision = score_level_fuse(per_epoch);
      labels[i] = decision.label;
      fused[i] = decision.mean_probability;
    }
    score_trace(trace, test_ref, labels, fused, cfg.vote);
  });

  return summarize(std::move(traces), cfg, plan, total_features);
}

}  // namespace pcg
