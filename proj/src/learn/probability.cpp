#include <cmath>

#include "pcg/error.hpp"
#include "pcg/learn.hpp"

namespace pcg {

double decision_to_probability(double d, const ProbabilityMap& map) {
  const double t = map.a * d + map.b;
  // Evaluate on the side that cannot overflow.
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

ProbabilityMap fit_platt(std::span<const double> dec, std::span<const Label> labels) {
  if (dec.size() != labels.size() || dec.empty()) throw DataError("Platt fit needs matched, non-empty inputs");
  const std::size_t n = dec.size();
  double prior1 = 0.0, prior0 = 0.0;
  for (Label l : labels) (l == Label::cad ? prior1 : prior0) += 1.0;

  const int max_iter = 100;
  const double min_step = 1e-10;
  const double sigma = 1e-12;
  const double eps = 1e-5;
  const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo_target = 1.0 / (prior0 + 2.0);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = labels[i] == Label::cad ? hi_target : lo_target;

  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fapb = dec[i] * a + b;
      f += fapb >= 0.0 ? t[i] * fapb + std::log1p(std::exp(-fapb)) : (t[i] - 1.0) * fapb + std::log1p(std::exp(fapb));
    }
    return f;
  };

  double a = 0.0;
  double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = objective(a, b);
  for (int iter = 0; iter < max_iter; ++iter) {
    double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fapb = dec[i] * a + b;
      double p, q;
      if (fapb >= 0.0) {
        p = std::exp(-fapb) / (1.0 + std::exp(-fapb));
        q = 1.0 / (1.0 + std::exp(-fapb));
      } else {
        p = 1.0 / (1.0 + std::exp(fapb));
        q = std::exp(fapb) / (1.0 + std::exp(fapb));
      }
      const double d2 = p * q;
      h11 += dec[i] * dec[i] * d2;
      h22 += d2;
      h21 += dec[i] * d2;
      const double d1 = t[i] - p;
      g1 += dec[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < eps && std::abs(g2) < eps) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= min_step) {
      const double na = a + step * da, nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < min_step) break;
  }
  return {a, b};
}

}  // namespace pcg
