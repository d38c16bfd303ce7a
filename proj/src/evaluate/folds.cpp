#include <algorithm>
#include <map>

#include "pcg/error.hpp"
#include "pcg/evaluate.hpp"
#include "pcg/rng.hpp"

namespace pcg {

FoldAssignment stratified_group_kfold(std::span<const std::string> subject_ids, std::span<const Label> labels, int k,
                                      std::uint64_t seed) {
  if (k < 2) throw ConfigError("k-fold needs k >= 2");
  if (subject_ids.size() != labels.size()) throw DataError("subject ids and labels differ in length");

  FoldAssignment fa;
  fa.k = k;
  std::map<std::string, std::size_t> index_of;
  for (std::size_t r = 0; r < subject_ids.size(); ++r) {
    auto [it, inserted] = index_of.emplace(subject_ids[r], fa.subjects.size());
    if (inserted) {
      fa.subjects.push_back(subject_ids[r]);
      fa.subject_labels.push_back(labels[r]);
    } else if (fa.subject_labels[it->second] != labels[r]) {
      throw DataError("subject " + subject_ids[r] + " has mixed labels");
    }
  }

  std::vector<std::size_t> cad, normal;
  for (std::size_t s = 0; s < fa.subjects.size(); ++s) {
    (fa.subject_labels[s] == Label::cad ? cad : normal).push_back(s);
  }
  const auto need = static_cast<std::size_t>(k);
  if (cad.size() < need || normal.size() < need) {
    throw DataError("class with fewer than k=" + std::to_string(k) + " subjects");
  }

  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(cad));
  rng.shuffle(std::span<std::size_t>(normal));
  fa.subject_fold.assign(fa.subjects.size(), 0);
  std::size_t dealt = 0;
  for (const auto* group : {&cad, &normal}) {
    for (std::size_t s : *group) fa.subject_fold[s] = static_cast<int>(dealt++ % need);
  }

  fa.row_fold.resize(subject_ids.size());
  for (std::size_t r = 0; r < subject_ids.size(); ++r) fa.row_fold[r] = fa.subject_fold[index_of.at(subject_ids[r])];
  return fa;
}

Label majority_vote(std::span<const Label> epoch_labels, VoteMode mode) {
  const std::size_t n = epoch_labels.size();
  if (mode == VoteMode::strict && n != static_cast<std::size_t>(3)) {
    throw DataError("expected 3 epochs, got " + std::to_string(n));
  }
  if (n == 0 || n % 2 == 0) throw DataError("majority vote needs an odd number of epochs, got " + std::to_string(n));
  const auto cad = static_cast<std::size_t>(std::count(epoch_labels.begin(), epoch_labels.end(), Label::cad));
  return 2 * cad > n ? Label::cad : Label::normal;
}

std::vector<SubjectVote> vote_subjects(std::span<const std::string> subject_ids, std::span<const Label> truth,
                                       std::span<const Label> predicted, std::span<const double> probabilities,
                                       VoteMode mode) {
  std::vector<SubjectVote> votes;
  std::map<std::string, std::size_t> index_of;
  for (std::size_t r = 0; r < subject_ids.size(); ++r) {
    auto [it, inserted] = index_of.emplace(subject_ids[r], votes.size());
    if (inserted) {
      SubjectVote v;
      v.subject_id = subject_ids[r];
      v.truth = truth[r];
      votes.push_back(std::move(v));
    }
    auto& v = votes[it->second];
    v.epoch_predictions.push_back(predicted[r]);
    v.mean_probability += probabilities.empty() ? 0.0 : probabilities[r];
  }
  for (auto& v : votes) {
    v.predicted = majority_vote(v.epoch_predictions, mode);
    v.mean_probability /= static_cast<double>(v.epoch_predictions.size());
  }
  return votes;
}

MetricSummary mean_metrics(std::span<const Metrics> metrics) {
  MetricSummary s;
  if (metrics.empty()) return s;
  for (const auto& m : metrics) {
    s.sens += m.sens;
    s.spec += m.spec;
    s.acc += m.acc;
    s.f1 += m.f1;
  }
  const double n = static_cast<double>(metrics.size());
  s.sens /= n;
  s.spec /= n;
  s.acc /= n;
  s.f1 /= n;
  return s;
}

}  // namespace pcg
