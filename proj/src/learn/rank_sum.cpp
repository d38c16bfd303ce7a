#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcg/error.hpp"
#include "pcg/learn.hpp"

namespace pcg {

namespace {

/// Midranks of the pooled sample, doubled so that every value is an integer.
std::vector<long long> doubled_midranks(std::span<const double> pooled, std::vector<std::size_t>& tie_sizes) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<long long> r2(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[idx[j + 1]] == pooled[idx[i]]) ++j;
    // ranks i+1 .. j+1 share (i + j + 2) / 2
    const auto twice = static_cast<long long>(i + j + 2);
    for (std::size_t t = i; t <= j; ++t) r2[idx[t]] = twice;
    tie_sizes.push_back(j - i + 1);
    i = j + 1;
  }
  return r2;
}

/// P(|S - E| >= |obs - E|) where S is the doubled rank sum of a uniformly
/// random n-subset of the pooled ranks.
double exact_two_sided(const std::vector<long long>& r2, std::size_t n, long long obs, long long expected2) {
  const long long total = std::accumulate(r2.begin(), r2.end(), 0LL);
  // ways[c][s]: number of c-subsets with doubled sum s.
  std::vector<std::vector<double>> ways(n + 1, std::vector<double>(static_cast<std::size_t>(total) + 1, 0.0));
  ways[0][0] = 1.0;
  for (long long r : r2) {
    for (std::size_t c = n; c >= 1; --c) {
      auto& dst = ways[c];
      const auto& src = ways[c - 1];
      for (long long s = total; s >= r; --s) dst[static_cast<std::size_t>(s)] += src[static_cast<std::size_t>(s - r)];
    }
  }
  const long long dev = std::llabs(obs - expected2);
  double tail = 0.0, all = 0.0;
  for (long long s = 0; s <= total; ++s) {
    const double w = ways[n][static_cast<std::size_t>(s)];
    all += w;
    if (std::llabs(s - expected2) >= dev) tail += w;
  }
  return std::min(1.0, tail / all);
}

}  // namespace

RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DataError("rank-sum test needs two non-empty samples");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  for (double v : pooled) {
    if (!std::isfinite(v)) throw NumericError("non-finite value in rank-sum test");
  }
  const std::size_t n = a.size(), m = b.size(), total = n + m;
  std::vector<std::size_t> ties;
  const auto r2 = doubled_midranks(pooled, ties);
  const long long w2 = std::accumulate(r2.begin(), r2.begin() + static_cast<long>(n), 0LL);
  const long long expected2 = static_cast<long long>(n * (total + 1));

  RankSumResult res;
  res.statistic = static_cast<double>(w2) / 2.0;
  const double expected = static_cast<double>(expected2) / 2.0;
  double tie_term = 0.0;
  for (std::size_t t : ties) tie_term += static_cast<double>(t * t * t - t);
  const double dn = static_cast<double>(total);
  const double var = static_cast<double>(n * m) / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  const double dev = res.statistic - expected;
  if (var > 0.0) {
    const double z = std::max(0.0, std::abs(dev) - 0.5) / std::sqrt(var);
    res.z = dev < 0.0 ? -z : z;
  }

  if (total <= kRankSumExactLimit) {
    res.exact = true;
    res.p_value = exact_two_sided(r2, n, w2, expected2);
  } else {
    res.p_value = var > 0.0 ? std::min(1.0, std::erfc(std::abs(res.z) / std::sqrt(2.0))) : 1.0;
  }
  return res;
}

}  // namespace pcg
