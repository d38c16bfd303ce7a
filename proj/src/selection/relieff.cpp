#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcg/error.hpp"
#include "pcg/log.hpp"
#include "pcg/selection.hpp"

namespace pcg {

namespace {

Matrix zscore_columns(const Matrix& x) {
  Matrix z(x.rows(), x.cols());
  const double n = static_cast<double>(x.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, j);
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) ss += (x(i, j) - mean) * (x(i, j) - mean);
    const double sd = std::sqrt(ss / n);
    for (std::size_t i = 0; i < x.rows(); ++i) z(i, j) = sd > 0.0 ? (x(i, j) - mean) / sd : 0.0;
  }
  return z;
}

}  // namespace

RankedFeatureSet relieff_rank(const FeatureMatrix& fm, int k) {
  const std::size_t n = fm.rows();
  const std::size_t d = fm.cols();
  if (n == 0 || d == 0) throw DataError("empty feature matrix");
  if (k < 1) throw ConfigError("ReliefF needs k >= 1");

  std::size_t n_cad = 0;
  for (Label l : fm.y) n_cad += l == Label::cad ? 1 : 0;
  const std::size_t smallest = std::min(n_cad, n - n_cad);
  if (smallest == 0) throw DataError("single-class input to ReliefF");
  if (smallest < 2) throw DataError("ReliefF needs at least two instances per class");
  std::size_t kk = static_cast<std::size_t>(k);
  if (kk > smallest - 1) {
    log::info("ReliefF k clamped from " + std::to_string(k) + " to " + std::to_string(smallest - 1));
    kk = smallest - 1;
  }

  const Matrix z = zscore_columns(fm.x);
  Matrix dist(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto zi = z.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto zj = z.row(j);
      double s = 0.0;
      for (std::size_t f = 0; f < d; ++f) {
        const double t = zi[f] - zj[f];
        s += t * t;
      }
      dist(i, j) = dist(j, i) = s;
    }
  }

  std::vector<double> range(d), inv_range(d, 0.0);
  for (std::size_t f = 0; f < d; ++f) {
    double lo = fm.x(0, f), hi = fm.x(0, f);
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, fm.x(i, f));
      hi = std::max(hi, fm.x(i, f));
    }
    range[f] = hi - lo;
    if (range[f] > 0.0) inv_range[f] = 1.0 / range[f];
  }

  // Rank-based influence: the r-th nearest (1-based) gets (k - r + 1) / sum.
  std::vector<double> influence(kk);
  const double total = static_cast<double>(kk * (kk + 1) / 2);
  for (std::size_t r = 0; r < kk; ++r) influence[r] = static_cast<double>(kk - r) / total;

  std::vector<double> w(d, 0.0);
  std::vector<std::size_t> hits, misses;
  for (std::size_t i = 0; i < n; ++i) {
    hits.clear();
    misses.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      (fm.y[j] == fm.y[i] ? hits : misses).push_back(j);
    }
    auto nearer = [&](std::size_t a, std::size_t b) {
      return dist(i, a) < dist(i, b) || (dist(i, a) == dist(i, b) && a < b);
    };
    std::partial_sort(hits.begin(), hits.begin() + static_cast<long>(kk), hits.end(), nearer);
    std::partial_sort(misses.begin(), misses.begin() + static_cast<long>(kk), misses.end(), nearer);

    const auto xi = fm.x.row(i);
    for (std::size_t r = 0; r < kk; ++r) {
      const auto xh = fm.x.row(hits[r]);
      const auto xm = fm.x.row(misses[r]);
      const double wr = influence[r];
      for (std::size_t f = 0; f < d; ++f) {
        w[f] += wr * (std::abs(xi[f] - xm[f]) - std::abs(xi[f] - xh[f])) * inv_range[f];
      }
    }
  }

  RankedFeatureSet out;
  out.method = RankingMethod::relieff;
  out.scores.resize(d);
  for (std::size_t f = 0; f < d; ++f) out.scores[f] = w[f] / static_cast<double>(n);
  out.order.resize(d);
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return out.scores[a] > out.scores[b]; });
  return out;
}

}  // namespace pcg
