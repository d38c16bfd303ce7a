#include "pcg/error.hpp"
#include "pcg/selection.hpp"

namespace pcg {

std::vector<std::size_t> search_dimensions(std::size_t n_features, std::size_t step, std::size_t max_dim) {
  if (step == 0) throw ConfigError("search step must be >= 1");
  const std::size_t top = max_dim == 0 ? n_features : std::min(max_dim, n_features);
  std::vector<std::size_t> dims;
  for (std::size_t d = step; d <= top; d += step) dims.push_back(d);
  if (dims.empty() || dims.back() != top) dims.push_back(top);
  return dims;
}

SearchResult incremental_search(const RankedFeatureSet& ranking, const SubsetEvaluator& evaluator, std::size_t step,
                                 std::size_t max_dim) {
  if (ranking.order.empty()) throw DataError("empty ranking");
  SearchResult result;
  bool have = false;
  for (std::size_t dim : search_dimensions(ranking.order.size(), step, max_dim)) {
    const std::span<const std::size_t> cols(ranking.order.data(), dim);
    Metrics m = evaluator(cols);
    result.trace.emplace_back(dim, m);
    if (!have || m.acc > result.best_metrics.acc) {
      result.best_dim = dim;
      result.best_metrics = m;
      have = true;
    }
  }
  return result;
}

}  // namespace pcg
