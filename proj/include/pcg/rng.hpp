#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace pcg {

/// Seedable 64-bit generator with portable draws.
///
/// The standard distributions are implementation-defined, so uniform, integer
/// and normal variates are derived here directly from the mt19937_64 stream.
/// Reports produced on different standard libraries stay bit-identical.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound), unbiased by rejection.
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal via Box-Muller.
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Independent substream seed for the given stream index.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace pcg
