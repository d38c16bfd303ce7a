#include <algorithm>
#include <cmath>
#include <limits>

#include "pcg/error.hpp"
#include "pcg/learn.hpp"

namespace pcg {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Standardizer {
  std::vector<double> mean, scale;
};

Standardizer fit_standardizer(const Matrix& x) {
  Standardizer s;
  const std::size_t n = x.rows(), d = x.cols();
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += x(i, j);
    m /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (x(i, j) - m) * (x(i, j) - m);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    s.mean[j] = m;
    s.scale[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

void scale_into(std::span<const double> in, const std::vector<double>& mean, const std::vector<double>& scale,
                std::span<double> out) {
  for (std::size_t j = 0; j < in.size(); ++j) out[j] = (in[j] - mean[j]) / scale[j];
}

enum class Bound : char { lower, upper, free };

/// Pairwise SMO on the C-SVC dual: min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0.
class SmoSolver {
 public:
  SmoSolver(const Matrix& q, std::span<const signed char> y, double c, const SvmTrainOptions& opt)
      : q_(q), y_(y), c_(c), opt_(opt), n_(y.size()), alpha_(n_, 0.0), grad_(n_, -1.0), status_(n_, Bound::lower) {}

  std::size_t solve(std::vector<double>* objective_trace) {
    std::size_t iter = 0;
    while (iter < opt_.max_iterations) {
      std::size_t i = 0, j = 0;
      if (!select_working_set(i, j)) break;
      ++iter;
      update_pair(i, j);
      if (objective_trace) objective_trace->push_back(objective());
    }
    if (iter >= opt_.max_iterations) throw NumericError("SMO did not converge within the iteration limit");
    return iter;
  }

  double objective() const {
    double f = 0.0;
    for (std::size_t t = 0; t < n_; ++t) f += alpha_[t] * (grad_[t] - 1.0);
    return 0.5 * f;
  }

  double rho() const {
    double ub = kInf, lb = -kInf, sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n_; ++t) {
      const double yg = y_[t] * grad_[t];
      if (status_[t] == Bound::upper) {
        if (y_[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else if (status_[t] == Bound::lower) {
        if (y_[t] == +1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        ++n_free;
        sum_free += yg;
      }
    }
    return n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  }

  const std::vector<double>& alpha() const { return alpha_; }

 private:
  bool is_upper(std::size_t t) const { return status_[t] == Bound::upper; }
  bool is_lower(std::size_t t) const { return status_[t] == Bound::lower; }

  void update_status(std::size_t t) {
    if (alpha_[t] >= c_) status_[t] = Bound::upper;
    else if (alpha_[t] <= 0.0) status_[t] = Bound::lower;
    else status_[t] = Bound::free;
  }

  // Second-order working set selection.
  bool select_working_set(std::size_t& out_i, std::size_t& out_j) const {
    double gmax = -kInf, gmax2 = -kInf;
    std::size_t gmax_idx = n_, gmin_idx = n_;
    double obj_diff_min = kInf;
    for (std::size_t t = 0; t < n_; ++t) {
      if (y_[t] == +1) {
        if (!is_upper(t) && -grad_[t] >= gmax) { gmax = -grad_[t]; gmax_idx = t; }
      } else {
        if (!is_lower(t) && grad_[t] >= gmax) { gmax = grad_[t]; gmax_idx = t; }
      }
    }
    if (gmax_idx == n_) return false;
    const std::size_t i = gmax_idx;
    const auto qi = q_.row(i);
    for (std::size_t t = 0; t < n_; ++t) {
      if (y_[t] == +1) {
        if (is_lower(t)) continue;
        const double grad_diff = gmax + grad_[t];
        gmax2 = std::max(gmax2, grad_[t]);
        if (grad_diff > 0.0) {
          const double quad = q_(i, i) + q_(t, t) - 2.0 * y_[i] * qi[t];
          const double obj_diff = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
          if (obj_diff <= obj_diff_min) { gmin_idx = t; obj_diff_min = obj_diff; }
        }
      } else {
        if (is_upper(t)) continue;
        const double grad_diff = gmax - grad_[t];
        gmax2 = std::max(gmax2, -grad_[t]);
        if (grad_diff > 0.0) {
          const double quad = q_(i, i) + q_(t, t) + 2.0 * y_[i] * qi[t];
          const double obj_diff = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
          if (obj_diff <= obj_diff_min) { gmin_idx = t; obj_diff_min = obj_diff; }
        }
      }
    }
    if (gmax + gmax2 < opt_.tolerance || gmin_idx == n_) return false;
    out_i = i;
    out_j = gmin_idx;
    return true;
  }

  void update_pair(std::size_t i, std::size_t j) {
    const auto qi = q_.row(i);
    const auto qj = q_.row(j);
    const double old_i = alpha_[i], old_j = alpha_[j];
    double& ai = alpha_[i];
    double& aj = alpha_[j];
    if (y_[i] != y_[j]) {
      double quad = q_(i, i) + q_(j, j) + 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) { aj = 0.0; ai = diff; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = -diff; }
      }
      if (diff > 0.0) {
        if (ai > c_) { ai = c_; aj = c_ - diff; }
      } else {
        if (aj > c_) { aj = c_; ai = c_ + diff; }
      }
    } else {
      double quad = q_(i, i) + q_(j, j) - 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c_) {
        if (ai > c_) { ai = c_; aj = sum - c_; }
      } else {
        if (aj < 0.0) { aj = 0.0; ai = sum; }
      }
      if (sum > c_) {
        if (aj > c_) { aj = c_; ai = sum - c_; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = sum; }
      }
    }
    const double d_i = ai - old_i, d_j = aj - old_j;
    for (std::size_t t = 0; t < n_; ++t) grad_[t] += qi[t] * d_i + qj[t] * d_j;
    update_status(i);
    update_status(j);
  }

  const Matrix& q_;
  std::span<const signed char> y_;
  double c_;
  SvmTrainOptions opt_;
  std::size_t n_;
  std::vector<double> alpha_, grad_;
  std::vector<Bound> status_;
};

}  // namespace

SvmTrainResult svm_train_detailed(const Matrix& x, std::span<const Label> y, const KernelSpec& kernel_in,
                                  const SvmTrainOptions& options) {
  const std::size_t n = x.rows(), d = x.cols();
  if (y.size() != n) throw DataError("label count does not match rows");
  if (n == 0 || d == 0) throw DataError("empty training matrix");
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw NumericError("non-finite feature value");
  }
  const auto n_cad = static_cast<std::size_t>(std::count(y.begin(), y.end(), Label::cad));
  if (n_cad == 0 || n_cad == n) throw DataError("single-class input to SVM training");
  if (!(kernel_in.c > 0.0)) throw ConfigError("SVM C must be positive");

  KernelSpec kernel = kernel_in;
  if (!kernel.gamma) kernel.gamma = 1.0 / static_cast<double>(d);
  if (kernel.kind != KernelKind::linear && !(*kernel.gamma > 0.0)) throw ConfigError("kernel gamma must be positive");

  const Standardizer st = fit_standardizer(x);
  Matrix xs(n, d);
  for (std::size_t i = 0; i < n; ++i) scale_into(x.row(i), st.mean, st.scale, xs.row(i));

  std::vector<signed char> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[i] == Label::cad ? 1 : -1;

  Matrix q(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double k = kernel_value(kernel, xs.row(i), xs.row(j));
      q(i, j) = q(j, i) = ys[i] * ys[j] * k;
    }
  }

  SmoSolver solver(q, ys, kernel.c, options);
  SvmTrainResult result;
  result.iterations = solver.solve(options.record_objective ? &result.objective_trace : nullptr);
  result.alpha = solver.alpha();

  SvmModel& model = result.model;
  model.kernel = kernel;
  model.feature_mean = st.mean;
  model.feature_scale = st.scale;
  model.bias = -solver.rho();
  std::vector<std::size_t> sv;
  for (std::size_t i = 0; i < n; ++i) {
    if (result.alpha[i] > 0.0) sv.push_back(i);
  }
  model.support_vectors = xs.select_rows(sv);
  for (std::size_t i : sv) model.dual_coefs.push_back(result.alpha[i] * ys[i]);
  return result;
}

SvmModel svm_train(const Matrix& x, std::span<const Label> y, const KernelSpec& kernel,
                   const SvmTrainOptions& options) {
  return svm_train_detailed(x, y, kernel, options).model;
}

double svm_decision(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.num_features()) {
    throw DataError("feature dimension mismatch: model expects " + std::to_string(model.num_features()) + ", got " +
                    std::to_string(x.size()));
  }
  std::vector<double> xs(x.size());
  scale_into(x, model.feature_mean, model.feature_scale, xs);
  double d = model.bias;
  for (std::size_t s = 0; s < model.dual_coefs.size(); ++s) {
    d += model.dual_coefs[s] * kernel_value(model.kernel, model.support_vectors.row(s), xs);
  }
  return d;
}

Label svm_predict(const SvmModel& model, std::span<const double> x) {
  return svm_decision(model, x) >= 0.0 ? Label::cad : Label::normal;
}

DualityGap duality_gap(const SvmTrainResult& result, const Matrix& x, std::span<const Label> y) {
  const SvmModel& m = result.model;
  double quad = 0.0, sum_alpha = 0.0, hinge = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double yi = y[i] == Label::cad ? 1.0 : -1.0;
    const double d = svm_decision(m, x.row(i));
    quad += result.alpha[i] * yi * (d - m.bias);
    sum_alpha += result.alpha[i];
    hinge += std::max(0.0, 1.0 - yi * d);
  }
  DualityGap g;
  g.primal = 0.5 * quad + m.kernel.c * hinge;
  g.dual = sum_alpha - 0.5 * quad;
  return g;
}

}  // namespace pcg
