#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pcg/error.hpp"
#include "pcg/selection.hpp"

namespace pcg {

std::vector<int> discretize_equal_frequency(std::span<const double> values, int bins) {
  if (bins < 1) throw ConfigError("bins must be >= 1");
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<int> level(n, 0);
  std::size_t first_of_run = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (r > 0 && values[idx[r]] != values[idx[r - 1]]) first_of_run = r;
    level[idx[r]] = static_cast<int>((first_of_run * static_cast<std::size_t>(bins)) / n);
  }
  return level;
}

double mutual_information(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw DataError("mutual information needs equal-length sequences");
  const std::size_t n = a.size();
  if (n == 0) return 0.0;
  const int na = *std::max_element(a.begin(), a.end()) + 1;
  const int nb = *std::max_element(b.begin(), b.end()) + 1;
  std::vector<double> joint(static_cast<std::size_t>(na * nb), 0.0), pa(static_cast<std::size_t>(na), 0.0),
      pb(static_cast<std::size_t>(nb), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    joint[static_cast<std::size_t>(a[i] * nb + b[i])] += 1.0;
    pa[static_cast<std::size_t>(a[i])] += 1.0;
    pb[static_cast<std::size_t>(b[i])] += 1.0;
  }
  const double dn = static_cast<double>(n);
  double mi = 0.0;
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      const double c = joint[static_cast<std::size_t>(i * nb + j)];
      if (c == 0.0) continue;
      mi += c / dn * std::log2(c * dn / (pa[static_cast<std::size_t>(i)] * pb[static_cast<std::size_t>(j)]));
    }
  }
  return std::max(0.0, mi);
}

RankedFeatureSet mrmr_rank(const FeatureMatrix& fm, int bins) {
  const std::size_t d = fm.cols();
  const std::size_t n = fm.rows();
  if (d == 0 || n == 0) throw DataError("empty feature matrix");

  std::vector<std::vector<int>> levels(d);
  for (std::size_t j = 0; j < d; ++j) levels[j] = discretize_equal_frequency(fm.x.column(j), bins);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(fm.y[i]);

  std::vector<double> relevance(d);
  for (std::size_t j = 0; j < d; ++j) relevance[j] = mutual_information(levels[j], labels);

  RankedFeatureSet out;
  out.method = RankingMethod::mrmr;
  out.scores.assign(d, 0.0);
  std::vector<double> redundancy(d, 0.0);
  std::vector<bool> picked(d, false);
  for (std::size_t step = 0; step < d; ++step) {
    std::size_t best = d;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < d; ++j) {
      if (picked[j]) continue;
      const double score = step == 0 ? relevance[j] : relevance[j] - redundancy[j] / static_cast<double>(step);
      // Exact MI ties are common on discrete data; keep the lower index.
      if (score > best_score + 1e-12) {
        best_score = score;
        best = j;
      }
    }
    picked[best] = true;
    out.order.push_back(best);
    out.scores[best] = best_score;
    if (step + 1 == d) break;
    for (std::size_t j = 0; j < d; ++j) {
      if (!picked[j]) redundancy[j] += mutual_information(levels[j], levels[best]);
    }
  }
  return out;
}

}  // namespace pcg
