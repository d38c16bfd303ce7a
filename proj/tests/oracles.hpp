#pragma once

// Straightforward reference implementations used to cross-check the library.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "pcg/selection.hpp"

namespace oracle {

inline double mutual_information(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> pa, pb;
  const double n = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0 / n;
    pa[a[i]] += 1.0 / n;
    pb[b[i]] += 1.0 / n;
  }
  double mi = 0.0;
  for (const auto& [key, p] : joint) mi += p * std::log2(p / (pa[key.first] * pb[key.second]));
  return mi;
}

/// Equal-frequency levels: level of the first occurrence rank of each value.
inline std::vector<int> discretize(const std::vector<double>& v, int bins) {
  std::vector<int> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t below = 0;
    for (double u : v) below += u < v[i] ? 1 : 0;
    out[i] = static_cast<int>(below * static_cast<std::size_t>(bins) / v.size());
  }
  return out;
}

inline std::vector<std::size_t> mrmr_order(const pcg::FeatureMatrix& fm, int bins) {
  const std::size_t d = fm.cols();
  std::vector<std::vector<int>> lv(d);
  for (std::size_t j = 0; j < d; ++j) lv[j] = discretize(fm.x.column(j), bins);
  std::vector<int> y;
  for (auto l : fm.y) y.push_back(l == pcg::Label::cad ? 1 : 0);
  std::vector<std::size_t> chosen;
  std::vector<bool> used(d, false);
  while (chosen.size() < d) {
    std::size_t best = d;
    double best_v = -1e300;
    for (std::size_t j = 0; j < d; ++j) {
      if (used[j]) continue;
      double v = mutual_information(lv[j], y);
      if (!chosen.empty()) {
        double red = 0.0;
        for (auto s : chosen) red += mutual_information(lv[j], lv[s]);
        v -= red / static_cast<double>(chosen.size());
      }
      if (v > best_v + 1e-12) {
        best_v = v;
        best = j;
      }
    }
    used[best] = true;
    chosen.push_back(best);
  }
  return chosen;
}

/// ReliefF weights: z-scored Euclidean neighbours, rank weights k..1,
/// range-normalized differences, averaged over instances.
inline std::vector<double> relieff_weights(const pcg::FeatureMatrix& fm, std::size_t k) {
  const std::size_t n = fm.rows(), d = fm.cols();
  std::vector<double> mean(d, 0.0), sd(d, 0.0), lo(d, 1e300), hi(d, -1e300);
  for (std::size_t f = 0; f < d; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      mean[f] += fm.x(i, f) / static_cast<double>(n);
      lo[f] = std::min(lo[f], fm.x(i, f));
      hi[f] = std::max(hi[f], fm.x(i, f));
    }
    for (std::size_t i = 0; i < n; ++i) sd[f] += std::pow(fm.x(i, f) - mean[f], 2) / static_cast<double>(n);
    sd[f] = std::sqrt(sd[f]);
  }
  auto dist = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t f = 0; f < d; ++f) {
      if (sd[f] == 0.0) continue;
      s += std::pow((fm.x(a, f) - fm.x(b, f)) / sd[f], 2);
    }
    return s;
  };
  std::vector<double> w(d, 0.0);
  const double norm = static_cast<double>(k * (k + 1)) / 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> hits, misses;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      (fm.y[j] == fm.y[i] ? hits : misses).push_back({dist(i, j), j});
    }
    std::sort(hits.begin(), hits.end());
    std::sort(misses.begin(), misses.end());
    for (std::size_t r = 0; r < k; ++r) {
      const double wr = static_cast<double>(k - r) / norm;
      for (std::size_t f = 0; f < d; ++f) {
        if (hi[f] == lo[f]) continue;
        const double range = hi[f] - lo[f];
        w[f] += wr * (std::abs(fm.x(i, f) - fm.x(misses[r].second, f)) -
                      std::abs(fm.x(i, f) - fm.x(hits[r].second, f))) / range;
      }
    }
  }
  for (auto& v : w) v /= static_cast<double>(n);
  return w;
}

}  // namespace oracle
