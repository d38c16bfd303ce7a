#include <algorithm>
#include <set>

#include "pcg/error.hpp"
#include "pcg/evaluate.hpp"
#include "pcg/log.hpp"

namespace pcg {

std::vector<std::vector<int>> all_channel_subsets(std::span<const int> channels) {
  std::vector<int> sorted(channels.begin(), channels.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw ConfigError("duplicate channel id");
  const std::size_t n = sorted.size();
  if (n > 20) throw ConfigError("too many channels for exhaustive subset search");

  std::vector<std::vector<int>> subsets;
  for (std::size_t size = 1; size <= n; ++size) {
    // Lexicographic combinations of `size` indices.
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      std::vector<int> s;
      for (std::size_t i : idx) s.push_back(sorted[i]);
      subsets.push_back(std::move(s));
      std::size_t i = size;
      while (i > 0 && idx[i - 1] == n - size + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return subsets;
}

EvaluationReport evaluate_combination(const std::map<int, FeatureMatrix>& per_channel, std::span<const int> channels,
                                      const CvConfig& cfg, const SelectionPlan& plan, FusionMode mode) {
  if (channels.empty()) throw ConfigError("empty channel combination");
  std::vector<FeatureMatrix> parts;
  for (int ch : channels) {
    const auto it = per_channel.find(ch);
    if (it == per_channel.end()) throw DataError("no features for channel " + std::to_string(ch));
    parts.push_back(it->second);
  }
  if (mode == FusionMode::feature_level) return cross_validate(feature_level_fuse(parts), cfg, plan);
  return cross_validate_score_fusion(parts, cfg, plan);
}

CombinationTable channel_combination_search(const std::map<int, FeatureMatrix>& per_channel, const CvConfig& cfg,
                                            const SelectionPlan& plan, FusionMode mode,
                                            std::vector<std::vector<int>> family) {
  if (family.empty()) {
    std::vector<int> available;
    for (const auto& [ch, fm] : per_channel) available.push_back(ch);
    family = all_channel_subsets(available);
  }
  CombinationTable table;
  for (const auto& subset : family) {
    log::info("evaluating channel combination of size " + std::to_string(subset.size()));
    const auto report = evaluate_combination(per_channel, subset, cfg, plan, mode);
    table.rows.push_back({subset, report.epoch_metrics, report.subject_metrics, report.fd_median});
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::size_t size = table.rows[r].channels.size();
    auto it = table.best_by_size.find(size);
    if (it == table.best_by_size.end()) {
      table.best_by_size.emplace(size, r);
      continue;
    }
    const auto& best = table.rows[it->second].subject;
    const auto& cand = table.rows[r].subject;
    if (cand.acc > best.acc || (cand.acc == best.acc && cand.f1 > best.f1)) it->second = r;
  }
  return table;
}

}  // namespace pcg
