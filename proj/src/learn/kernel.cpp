#include <algorithm>
#include <cctype>
#include <cmath>

#include "pcg/error.hpp"
#include "pcg/learn.hpp"

namespace pcg {

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::rbf: return "rbf";
    case KernelKind::linear: return "linear";
    case KernelKind::poly3: return "poly3";
    case KernelKind::sigmoid: return "sigmoid";
  }
  return "rbf";
}

KernelKind parse_kernel_kind(std::string_view token) {
  std::string t(token);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "rbf") return KernelKind::rbf;
  if (t == "linear") return KernelKind::linear;
  if (t == "poly3" || t == "cubic") return KernelKind::poly3;
  if (t == "sigmoid") return KernelKind::sigmoid;
  throw ConfigError("unknown kernel '" + t + "'");
}

double kernel_value(const KernelSpec& k, std::span<const double> a, std::span<const double> b) {
  const double gamma = k.gamma.value_or(1.0);
  switch (k.kind) {
    case KernelKind::rbf: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
      }
      return std::exp(-gamma * s);
    }
    case KernelKind::linear: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
      return s;
    }
    case KernelKind::poly3: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
      const double base = gamma * s + k.coef0;
      return base * base * base;
    }
    case KernelKind::sigmoid: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
      return std::tanh(gamma * s + k.coef0);
    }
  }
  return 0.0;
}

}  // namespace pcg
