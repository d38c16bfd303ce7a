#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "pcg/error.hpp"
#include "pcg/learn.hpp"

namespace pcg {

std::string_view to_string(DistanceMetric metric) {
  switch (metric) {
    case DistanceMetric::euclidean: return "euclidean";
    case DistanceMetric::cosine: return "cosine";
    case DistanceMetric::cityblock: return "cityblock";
    case DistanceMetric::correlation: return "correlation";
  }
  return "euclidean";
}

DistanceMetric parse_distance_metric(std::string_view token) {
  std::string t(token);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "euclidean") return DistanceMetric::euclidean;
  if (t == "cosine") return DistanceMetric::cosine;
  if (t == "cityblock") return DistanceMetric::cityblock;
  if (t == "correlation") return DistanceMetric::correlation;
  throw ConfigError("unknown distance metric '" + t + "'");
}

double distance(DistanceMetric metric, std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  switch (metric) {
    case DistanceMetric::euclidean: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
      return std::sqrt(s);
    }
    case DistanceMetric::cityblock: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += std::abs(a[i] - b[i]);
      return s;
    }
    case DistanceMetric::cosine:
    case DistanceMetric::correlation: {
      double ma = 0.0, mb = 0.0;
      if (metric == DistanceMetric::correlation && n > 0) {
        ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
        mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
      }
      double ab = 0.0, aa = 0.0, bb = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double u = a[i] - ma, v = b[i] - mb;
        ab += u * v;
        aa += u * u;
        bb += v * v;
      }
      if (aa <= 0.0 || bb <= 0.0) return 1.0;
      return 1.0 - ab / std::sqrt(aa * bb);
    }
  }
  return 0.0;
}

std::vector<std::size_t> nearest_neighbors(const Matrix& train, std::span<const double> query, std::size_t k,
                                           DistanceMetric metric) {
  if (query.size() != train.cols()) throw DataError("feature dimension mismatch in k-NN query");
  const std::size_t n = train.rows();
  k = std::min(k, n);
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = distance(metric, train.row(i), query);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(k), idx.end(), [&](std::size_t a, std::size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  });
  idx.resize(k);
  return idx;
}

double knn_cad_fraction(const Matrix& train_x, std::span<const Label> train_y, std::span<const double> query, int k,
                        DistanceMetric metric) {
  if (k <= 0) throw ConfigError("k-NN needs k >= 1");
  if (train_y.size() != train_x.rows()) throw DataError("label count does not match rows");
  if (static_cast<std::size_t>(k) > train_x.rows()) throw ConfigError("k-NN k exceeds the training set size");
  const auto nn = nearest_neighbors(train_x, query, static_cast<std::size_t>(k), metric);
  std::size_t cad = 0;
  for (std::size_t i : nn) cad += train_y[i] == Label::cad ? 1 : 0;
  return static_cast<double>(cad) / static_cast<double>(nn.size());
}

Label knn_predict(const Matrix& train_x, std::span<const Label> train_y, std::span<const double> query, int k,
                  DistanceMetric metric) {
  return knn_cad_fraction(train_x, train_y, query, k, metric) >= 0.5 ? Label::cad : Label::normal;
}

}  // namespace pcg
