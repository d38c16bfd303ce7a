#include <doctest.h>

#include "pcg/error.hpp"
#include "pcg/spectral.hpp"
#include "support.hpp"

using namespace pcg;

namespace {

/// Independent trapezoid over [0, fs/2].
double total_power(const PsdEstimate& psd) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < psd.density.size(); ++k) {
    s += 0.5 * (psd.density[k] + psd.density[k + 1]) * (psd.freqs_hz[k + 1] - psd.freqs_hz[k]);
  }
  return s;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("hanning window endpoints, midpoint and symmetry") {
    for (std::size_t n : {2u, 3u, 8u, 101u, 1024u}) {
      CAPTURE(n);
      const auto w = hanning_window(n);
      REQUIRE(w.size() == n + 1);
      CHECK(w[0] == 0.0);
      if (n % 2 == 0) CHECK(std::abs(w[n / 2] - 1.0) < 1e-12);
      for (std::size_t i = 0; i <= n; ++i) {
        REQUIRE(std::abs(w[i] - w[n - i]) < 1e-12);
        REQUIRE(std::abs(w[i] - 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / n))) < 1e-12);
      }
    }
    CHECK_THROWS_AS(hanning_window(1), ConfigError);
    const auto t = hanning_taper(16);
    CHECK(t.size() == 16);
    CHECK(t[8] == doctest::Approx(1.0));
  }

  TEST_CASE("default grid spacing is 1.953125 Hz and spans [0, fs/2]") {
    const auto psd = welch_psd(testing::white_noise(4000, 1), 2000.0);
    CHECK(psd.bin_spacing_hz == 1.953125);
    CHECK(psd.freqs_hz.front() == 0.0);
    CHECK(psd.freqs_hz.back() == 1000.0);
    CHECK(psd.density.size() == 513);
    for (double v : psd.density) REQUIRE(v >= 0.0);
  }

  TEST_CASE("white noise integrates to its variance") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto psd = welch_psd(testing::white_noise(20000, seed), 2000.0);
      CHECK(std::abs(total_power(psd) - 1.0) < 0.05);
    }
  }

  TEST_CASE("unit sine puts 0.5 into its peak bins") {
    const auto psd = welch_psd(testing::tone(100.0, 2000.0, 20000), 2000.0);
    const auto centre = static_cast<std::size_t>(std::llround(100.0 / psd.bin_spacing_hz));
    CHECK(std::abs(integrate_bins(psd, centre - 3, centre + 3) - 0.5) < 0.025);
  }

  TEST_CASE("short epoch is rejected") {
    CHECK_THROWS_WITH_AS(welch_psd(std::vector<double>(1000, 1.0), 2000.0),
                         doctest::Contains("shorter than one Welch window"), DataError);
  }

  TEST_CASE("sub-band widths map to whole bins") {
    const std::size_t expected[] = {3, 6, 9, 12, 15, 18, 24, 30};
    for (std::size_t i = 0; i < kSubBandWidthsHz.size(); ++i) {
      CHECK(subband_bins({kSubBandWidthsHz[i], 1000.0, true}, 1.953125) == expected[i]);
    }
    CHECK_THROWS_AS(subband_bins({10.0, 1000.0, true}, 1.953125), ConfigError);
    CHECK(subband_bins({10.0, 1000.0, false}, 1.953125) == 5);
  }

  TEST_CASE("feature count is floor(tbw / sbw) over the whole grid") {
    const auto psd = welch_psd(testing::white_noise(4096, 3), 2000.0);
    for (double sbw : kSubBandWidthsHz) {
      for (int tbw = 300; tbw <= 1000; tbw += 100) {
        CAPTURE(sbw);
        CAPTURE(tbw);
        const auto f = subband_powers(psd, {sbw, static_cast<double>(tbw), true});
        CHECK(f.size() == static_cast<std::size_t>(std::floor(tbw / sbw)));
      }
    }
    CHECK(subband_powers(psd, {58.6, 300.0, true}).size() == 5);
    CHECK_THROWS_AS(subband_powers(psd, {58.6, 350.0, true}), ConfigError);
  }

  TEST_CASE("flat density integrates to p times width") {
    PsdEstimate psd;
    psd.bin_spacing_hz = 1.953125;
    for (std::size_t k = 0; k <= 512; ++k) {
      psd.freqs_hz.push_back(k * psd.bin_spacing_hz);
      psd.density.push_back(0.25);
    }
    const auto f = subband_powers(psd, {11.72, 1000.0, true});
    for (double v : f) CHECK(v == doctest::Approx(0.25 * 6 * 1.953125).epsilon(1e-12));
  }

  TEST_CASE("bands add up to the whole integral") {
    const auto psd = welch_psd(testing::white_noise(5000, 4), 2000.0);
    for (double sbw : kSubBandWidthsHz) {
      const auto f = subband_powers(psd, {sbw, 1000.0, true});
      const std::size_t m = subband_bins({sbw, 1000.0, true}, psd.bin_spacing_hz);
      double sum = 0.0;
      for (double v : f) {
        REQUIRE(v >= 0.0);
        sum += v;
      }
      CHECK(std::abs(sum - integrate_bins(psd, 0, f.size() * m)) < 1e-9);
    }
  }

  TEST_CASE("doubling amplitude quadruples every band") {
    auto x = testing::white_noise(5000, 5);
    const auto a = subband_powers(welch_psd(x, 2000.0), {});
    for (auto& v : x) v *= 2.0;
    const auto b = subband_powers(welch_psd(x, 2000.0), {});
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(std::abs(b[i] / a[i] - 4.0) < 4e-6);
  }
}
