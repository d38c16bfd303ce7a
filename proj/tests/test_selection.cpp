#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "pcg/error.hpp"
#include "pcg/rng.hpp"
#include "pcg/selection.hpp"
#include "support.hpp"

using namespace pcg;

namespace {

FeatureMatrix random_matrix(std::uint64_t seed, std::size_t per_class, std::size_t cols) {
  Rng rng(seed);
  return testing::make_matrix(per_class, 1, cols, [&](std::size_t, std::size_t c, Label l) {
    const double shift = l == Label::cad ? 0.3 * static_cast<double>(c % 3) : 0.0;
    return rng.normal() + shift;
  });
}

std::vector<int> as_ints(const std::vector<Label>& y) {
  std::vector<int> out;
  for (auto l : y) out.push_back(l == Label::cad ? 1 : 0);
  return out;
}

}  // namespace

TEST_SUITE("selection") {
  TEST_CASE("mutual information matches a brute-force count") {
    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<int> a(200), b(200);
      for (auto& v : a) v = static_cast<int>(rng.below(5));
      for (std::size_t i = 0; i < b.size(); ++i) b[i] = rng.uniform() < 0.5 ? a[i] : static_cast<int>(rng.below(4));
      REQUIRE(mutual_information(a, b) == doctest::Approx(oracle::mutual_information(a, b)).epsilon(1e-12));
    }
    const std::vector<int> same{0, 1, 0, 1};
    CHECK(mutual_information(same, same) == doctest::Approx(1.0));
  }

  TEST_CASE("equal-frequency discretization keeps ties together") {
    const std::vector<double> v{5, 1, 1, 1, 2, 3, 4, 4, 9, 7};
    const auto lv = discretize_equal_frequency(v, 5);
    CHECK(lv[1] == lv[2]);
    CHECK(lv[2] == lv[3]);
    CHECK(lv[6] == lv[7]);
    CHECK(lv == oracle::discretize(v, 5));
    CHECK(*std::max_element(lv.begin(), lv.end()) < 5);
  }

  TEST_CASE("MRMR picks a label copy first") {
    Rng rng(2);
    const auto fm = testing::make_matrix(50, 1, 4, [&](std::size_t, std::size_t c, Label l) {
      if (c == 2) return l == Label::cad ? 1.0 : 0.0;
      return rng.normal();
    });
    const auto r = mrmr_rank(fm);
    CHECK(r.order[0] == 2);
    CHECK(r.scores[2] == doctest::Approx(1.0));
  }

  TEST_CASE("MRMR ranks an exact duplicate of the first pick last") {
    Rng rng(3);
    std::vector<double> strong;
    auto fm = testing::make_matrix(50, 1, 6, [&](std::size_t r, std::size_t c, Label l) {
      if (c == 0) {
        strong.push_back(rng.normal() + (l == Label::cad ? 2.0 : 0.0));
        return strong.back();
      }
      if (c == 1) return strong[r];
      if (c == 2) return rng.normal() + (l == Label::cad ? 0.8 : 0.0);
      return rng.normal();
    });
    const auto r = mrmr_rank(fm);
    CHECK(r.order.front() == 0);
    CHECK(r.order.back() == 1);
    CHECK(r.order[1] == 2);
  }

  TEST_CASE("MRMR order agrees with an independent greedy oracle") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto fm = random_matrix(seed, 20, 8);
      CAPTURE(seed);
      REQUIRE(mrmr_rank(fm).order == oracle::mrmr_order(fm, 10));
    }
  }

  TEST_CASE("MRMR relevance of pure noise is small") {
    const auto fm = testing::make_matrix(1000, 1, 1, [rng = Rng(3)](std::size_t, std::size_t, Label) mutable {
      return rng.normal();
    });
    const auto lv = discretize_equal_frequency(fm.x.column(0), 10);
    CHECK(mutual_information(lv, as_ints(fm.y)) < 0.05);
  }

  TEST_CASE("ReliefF weights agree with an independent oracle") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto fm = random_matrix(100 + seed, 15, 6);
      const auto got = relieff_rank(fm, 5);
      const auto want = oracle::relieff_weights(fm, 5);
      CAPTURE(seed);
      for (std::size_t f = 0; f < 6; ++f) REQUIRE(got.scores[f] == doctest::Approx(want[f]).epsilon(1e-9));
    }
  }

  TEST_CASE("ReliefF hand case: a label indicator scores 1, a constant 0") {
    const auto fm = testing::make_matrix(3, 1, 2, [](std::size_t, std::size_t c, Label l) {
      return c == 0 ? (l == Label::cad ? 1.0 : 0.0) : 4.0;
    });
    const auto r = relieff_rank(fm, 2);
    CHECK(r.scores[0] == doctest::Approx(1.0));
    CHECK(r.scores[1] == 0.0);
    CHECK(r.order == std::vector<std::size_t>{0, 1});
  }

  TEST_CASE("ReliefF hand case: a separating feature gets the largest positive weight") {
    // Six points, k = 2. Column 0 splits the classes into tight clusters,
    // columns 1 and 2 are shuffled values shared by both classes.
    FeatureMatrix fm;
    fm.x = Matrix(6, 3);
    const double sep[6] = {0.0, 0.1, 0.2, 5.0, 5.1, 5.2};
    const double n1[6] = {1.0, 3.0, 2.0, 3.0, 1.0, 2.0};
    const double n2[6] = {4.0, 6.0, 5.0, 5.0, 6.0, 4.0};
    for (std::size_t i = 0; i < 6; ++i) {
      fm.x(i, 0) = sep[i];
      fm.x(i, 1) = n1[i];
      fm.x(i, 2) = n2[i];
      fm.y.push_back(i < 3 ? Label::cad : Label::normal);
      fm.subject_ids.push_back("s" + std::to_string(i));
      fm.epoch_idx.push_back(0);
    }
    fm.columns = {{1, "sep"}, {1, "n1"}, {1, "n2"}};
    const auto r = relieff_rank(fm, 2);
    CHECK(r.order.front() == 0);
    CHECK(r.scores[0] > 0.0);
    CHECK(r.scores[0] > r.scores[1]);
    CHECK(r.scores[0] > r.scores[2]);
    const auto want = oracle::relieff_weights(fm, 2);
    for (std::size_t j = 0; j < 3; ++j) CHECK(r.scores[j] == doctest::Approx(want[j]).epsilon(1e-12));
  }

  TEST_CASE("ReliefF clamps k to the smallest class") {
    const auto fm = random_matrix(7, 4, 3);
    CHECK(relieff_rank(fm, 100).scores == relieff_rank(fm, 3).scores);
  }

  TEST_CASE("ReliefF on pure noise stays near zero") {
    const auto fm = testing::make_matrix(250, 1, 3, [rng = Rng(9)](std::size_t, std::size_t, Label) mutable {
      return rng.normal();
    });
    for (double w : relieff_rank(fm, 10).scores) CHECK(std::abs(w) < 0.05);
  }

  TEST_CASE("ReliefF is invariant to label flips and positive feature scaling") {
    auto fm = random_matrix(11, 20, 5);
    const auto base = relieff_rank(fm, 10).scores;
    auto flipped = fm;
    for (auto& l : flipped.y) l = flip(l);
    const auto f = relieff_rank(flipped, 10).scores;
    auto scaled = fm;
    for (std::size_t i = 0; i < scaled.rows(); ++i) scaled.x(i, 2) = 17.0 * scaled.x(i, 2) - 3.0;
    const auto s = relieff_rank(scaled, 10).scores;
    for (std::size_t j = 0; j < base.size(); ++j) {
      CHECK(f[j] == doctest::Approx(base[j]).epsilon(1e-12));
      CHECK(s[j] == doctest::Approx(base[j]).epsilon(1e-9));
    }
  }

  TEST_CASE("rankings are permutations") {
    const auto fm = random_matrix(5, 10, 12);
    for (auto m : {RankingMethod::none, RankingMethod::mrmr, RankingMethod::relieff}) {
      const auto r = rank_features(fm, m);
      std::set<std::size_t> seen(r.order.begin(), r.order.end());
      CHECK(seen.size() == 12);
      CHECK(*seen.rbegin() == 11);
    }
  }

  TEST_CASE("search dimensions") {
    CHECK(search_dimensions(5) == std::vector<std::size_t>{2, 4, 5});
    CHECK(search_dimensions(6) == std::vector<std::size_t>{2, 4, 6});
    CHECK(search_dimensions(1) == std::vector<std::size_t>{1});
    CHECK(search_dimensions(100, 20, 50) == std::vector<std::size_t>{20, 40, 50});
    CHECK_THROWS_AS(search_dimensions(5, 0), ConfigError);
  }

  TEST_CASE("incremental search keeps the best and prefers the smaller dimension on ties") {
    const auto ranking = identity_ranking(5);
    const auto res = incremental_search(ranking, [](std::span<const std::size_t> cols) {
      Metrics m;
      m.acc = cols.size() == 2 ? 0.9 : cols.size() == 4 ? 0.9 : 0.5;
      return m;
    });
    CHECK(res.best_dim == 2);
    CHECK(res.best_metrics.acc == 0.9);
    CHECK(res.trace.size() == 3);
  }

  TEST_CASE("feature matrix validation") {
    auto fm = random_matrix(1, 3, 2);
    CHECK_NOTHROW(validate(fm));
    fm.x(0, 0) = std::nan("");
    CHECK_THROWS_AS(validate(fm), NumericError);
    fm = random_matrix(1, 3, 2);
    fm.subject_ids[1] = fm.subject_ids[0];
    CHECK_THROWS_AS(validate(fm), DataError);
  }
}
