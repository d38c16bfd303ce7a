#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "pcg/rng.hpp"
#include "pcg/selection.hpp"

namespace testing {

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("pcg_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<double> tone(double freq_hz, double fs_hz, std::size_t n, double amp = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = amp * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / fs_hz + phase);
  }
  return x;
}

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  pcg::Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = sd * rng.normal();
  return x;
}

inline double rms(const std::vector<double>& x, std::size_t from = 0, std::size_t to = 0) {
  if (to == 0) to = x.size();
  double s = 0.0;
  for (std::size_t i = from; i < to; ++i) s += x[i] * x[i];
  return std::sqrt(s / static_cast<double>(to - from));
}

/// Feature matrix with `per_class` subjects per class and `epochs` rows per
/// subject, filled by fn(row, col, label).
template <typename Fn>
pcg::FeatureMatrix make_matrix(std::size_t per_class, std::size_t epochs, std::size_t cols, Fn fn) {
  pcg::FeatureMatrix fm;
  const std::size_t n = 2 * per_class * epochs;
  fm.x = pcg::Matrix(n, cols);
  std::size_t r = 0;
  for (std::size_t s = 0; s < 2 * per_class; ++s) {
    const auto label = s % 2 == 0 ? pcg::Label::cad : pcg::Label::normal;
    for (std::size_t e = 0; e < epochs; ++e, ++r) {
      fm.y.push_back(label);
      fm.subject_ids.push_back("s" + std::to_string(s));
      fm.epoch_idx.push_back(static_cast<int>(e));
      for (std::size_t c = 0; c < cols; ++c) fm.x(r, c) = fn(r, c, label);
    }
  }
  for (std::size_t c = 0; c < cols; ++c) fm.columns.push_back({1, "f" + std::to_string(c)});
  return fm;
}

}  // namespace testing
