#include "pcg/error.hpp"
#include "pcg/evaluate.hpp"
#include "pcg/rng.hpp"
#include "pipeline.hpp"

namespace pcg {

std::vector<SubjectPrediction> train_full_and_predict(const FeatureMatrix& train, const FeatureMatrix& heldout,
                                                      const CvConfig& cfg, const SelectionPlan& plan) {
  validate(train);
  validate(cfg);
  if (heldout.rows() == 0) return {};
  validate(heldout);
  if (heldout.columns != train.columns) throw ConfigError("held-out feature columns do not match the training columns");

  const auto choice = detail::choose_columns(train, cfg, plan, substream_seed(cfg.rng_seed, 0));
  const auto pred = detail::fit_predict(train, heldout, choice, cfg);
  const auto votes = vote_subjects(heldout.subject_ids, heldout.y, pred.labels, pred.probabilities, cfg.vote);
  std::vector<SubjectPrediction> out;
  for (const auto& v : votes) {
    SubjectPrediction p;
    p.subject_id = v.subject_id;
    p.label = v.predicted;
    p.truth = v.truth;
    p.epoch_labels = v.epoch_predictions;
    p.mean_probability = v.mean_probability;
    for (std::size_t r = 0; r < heldout.rows(); ++r) {
      if (heldout.subject_ids[r] == v.subject_id) p.epoch_probabilities.push_back(pred.probabilities[r]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace pcg
