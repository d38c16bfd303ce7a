#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "pcg/error.hpp"
#include "pcg/evaluate.hpp"
#include "pcg/rng.hpp"
#include "support.hpp"

using namespace pcg;

namespace {

/// 3 epochs per subject; column 0 carries the class when `signal` > 0.
FeatureMatrix cohort(std::size_t per_class, std::size_t cols, double signal, std::uint64_t seed) {
  Rng rng(seed);
  return testing::make_matrix(per_class, 3, cols, [&](std::size_t, std::size_t c, Label l) {
    const double shift = (c == 0 && l == Label::cad) ? signal : 0.0;
    return rng.normal() + shift;
  });
}

CvConfig quick_cv(int iterations = 2) {
  CvConfig cfg;
  cfg.iterations = iterations;
  cfg.rng_seed = 42;
  return cfg;
}

SelectionPlan all_features() {
  SelectionPlan plan;
  plan.method = RankingMethod::none;
  return plan;
}

}  // namespace

TEST_SUITE("evaluate") {
  TEST_CASE("80 subjects split into 5 balanced folds of 16") {
    const auto fm = cohort(40, 1, 0.0, 1);
    const auto f = stratified_group_kfold(fm.subject_ids, fm.y, 5, 7);
    REQUIRE(f.subjects.size() == 80);
    for (int k = 0; k < 5; ++k) {
      std::size_t cad = 0, normal = 0;
      for (std::size_t s = 0; s < 80; ++s) {
        if (f.subject_fold[s] != k) continue;
        (f.subject_labels[s] == Label::cad ? cad : normal) += 1;
      }
      CHECK(cad == 8);
      CHECK(normal == 8);
    }
  }

  TEST_CASE("every epoch inherits its subject's fold, for any seed") {
    const auto fm = cohort(40, 1, 0.0, 1);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto f = stratified_group_kfold(fm.subject_ids, fm.y, 5, seed);
      std::map<std::string, int> fold_of;
      for (std::size_t r = 0; r < fm.rows(); ++r) {
        auto [it, fresh] = fold_of.emplace(fm.subject_ids[r], f.row_fold[r]);
        REQUIRE(it->second == f.row_fold[r]);
      }
      REQUIRE(fold_of.size() == 80);
    }
  }

  TEST_CASE("fold assignment is a function of the seed") {
    const auto fm = cohort(10, 1, 0.0, 1);
    const auto a = stratified_group_kfold(fm.subject_ids, fm.y, 5, 3);
    const auto b = stratified_group_kfold(fm.subject_ids, fm.y, 5, 3);
    const auto c = stratified_group_kfold(fm.subject_ids, fm.y, 5, 4);
    CHECK(a.subject_fold == b.subject_fold);
    CHECK(a.subject_fold != c.subject_fold);
  }

  TEST_CASE("fold errors") {
    const auto fm = cohort(3, 1, 0.0, 1);
    CHECK_THROWS_AS(stratified_group_kfold(fm.subject_ids, fm.y, 1, 0), ConfigError);
    CHECK_THROWS_AS(stratified_group_kfold(fm.subject_ids, fm.y, 5, 0), DataError);
    auto mixed = fm;
    mixed.y[1] = flip(mixed.y[1]);
    CHECK_THROWS_WITH_AS(stratified_group_kfold(mixed.subject_ids, mixed.y, 2, 0), doctest::Contains("mixed labels"),
                         DataError);
  }

  TEST_CASE("majority vote") {
    using L = Label;
    CHECK(majority_vote(std::vector<L>{L::cad, L::cad, L::normal}) == L::cad);
    CHECK(majority_vote(std::vector<L>{L::normal, L::cad, L::normal}) == L::normal);
    CHECK(majority_vote(std::vector<L>{L::cad, L::cad, L::cad}) == L::cad);
    CHECK_THROWS_AS(majority_vote(std::vector<L>{L::cad, L::normal}), DataError);
    CHECK_THROWS_AS(majority_vote(std::vector<L>{L::cad, L::cad, L::normal, L::normal, L::cad}), DataError);
    CHECK(majority_vote(std::vector<L>{L::cad, L::cad, L::normal, L::normal, L::cad}, VoteMode::permissive) == L::cad);
    CHECK(majority_vote(std::vector<L>{L::normal}, VoteMode::permissive) == L::normal);
    CHECK_THROWS_AS(majority_vote(std::vector<L>{L::cad, L::normal}, VoteMode::permissive), DataError);
  }

  TEST_CASE("subjects are voted in first-appearance order") {
    const std::vector<std::string> ids{"b", "b", "b", "a", "a", "a"};
    const std::vector<Label> truth{Label::cad, Label::cad, Label::cad, Label::normal, Label::normal, Label::normal};
    const std::vector<Label> pred{Label::cad, Label::normal, Label::cad, Label::cad, Label::normal, Label::normal};
    const std::vector<double> p{0.9, 0.2, 0.7, 0.6, 0.1, 0.2};
    const auto v = vote_subjects(ids, truth, pred, p, VoteMode::strict);
    REQUIRE(v.size() == 2);
    CHECK(v[0].subject_id == "b");
    CHECK(v[0].predicted == Label::cad);
    CHECK(v[0].mean_probability == doctest::Approx(0.6));
    CHECK(v[1].predicted == Label::normal);
  }

  TEST_CASE("20 iterations of 5 folds give 100 leak-free models") {
    const auto fm = cohort(40, 4, 3.0, 2);
    auto cfg = quick_cv(20);
    const auto rep = cross_validate(fm, cfg, all_features());
    REQUIRE(rep.models.size() == 100);
    CHECK(rep.leakage_violations == 0);
    for (int it = 0; it < 20; ++it) {
      std::set<std::string> tested;
      for (int k = 0; k < 5; ++k) {
        const auto& m = rep.models[static_cast<std::size_t>(it * 5 + k)];
        CHECK(m.iteration == it);
        CHECK(m.fold == k);
        CHECK(m.test_subjects.size() == 16);
        CHECK(m.train_subjects.size() == 64);
        for (const auto& s : m.test_subjects) {
          CHECK(std::find(m.train_subjects.begin(), m.train_subjects.end(), s) == m.train_subjects.end());
          tested.insert(s);
        }
      }
      CHECK(tested.size() == 80);
    }
  }

  TEST_CASE("separable subjects are classified perfectly") {
    Rng rng(3);
    const auto fm = testing::make_matrix(20, 3, 3, [&](std::size_t, std::size_t, Label l) {
      return rng.uniform(-1.0, 1.0) + (l == Label::cad ? 10.0 : 0.0);
    });
    const auto rep = cross_validate(fm, quick_cv(), all_features());
    CHECK(rep.subject_metrics.acc == 1.0);
    CHECK(rep.epoch_metrics.acc == 1.0);
    CHECK(rep.subject_pooled.total() == 2u * 40u);
    CHECK(rep.epoch_pooled.total() == 2u * 120u);
  }

  TEST_CASE("permuted labels give chance accuracy") {
    auto fm = cohort(40, 5, 0.0, 4);
    std::vector<Label> subject_label(80);
    for (std::size_t s = 0; s < 80; ++s) subject_label[s] = s % 2 == 0 ? Label::cad : Label::normal;
    Rng rng(11);
    rng.shuffle(std::span<Label>(subject_label));
    for (std::size_t r = 0; r < fm.rows(); ++r) fm.y[r] = subject_label[r / 3];
    const auto rep = cross_validate(fm, quick_cv(20), all_features());
    CHECK(std::abs(rep.subject_metrics.acc - 0.5) <= 0.1);
  }

  TEST_CASE("cross-validation is deterministic and independent of the job count") {
    const auto fm = cohort(10, 6, 1.0, 5);
    auto cfg = quick_cv(3);
    SelectionPlan plan;
    plan.method = RankingMethod::relieff;
    plan.search = true;
    plan.step = 2;
    const auto a = cross_validate(fm, cfg, plan);
    cfg.jobs = 3;
    const auto b = cross_validate(fm, cfg, plan);
    REQUIRE(a.models.size() == b.models.size());
    for (std::size_t i = 0; i < a.models.size(); ++i) {
      CHECK(a.models[i].dim == b.models[i].dim);
      CHECK(a.models[i].subject.confusion == b.models[i].subject.confusion);
      CHECK(a.models[i].test_subjects == b.models[i].test_subjects);
    }
    CHECK(a.subject_metrics.acc == b.subject_metrics.acc);
    CHECK(a.fd_median == b.fd_median);
  }

  TEST_CASE("fixed dimension and k-NN") {
    const auto fm = cohort(10, 6, 4.0, 6);
    auto cfg = quick_cv();
    cfg.classifier = KnnSpec{5, DistanceMetric::euclidean};
    SelectionPlan plan;
    plan.method = RankingMethod::mrmr;
    plan.fixed_dim = 2;
    const auto rep = cross_validate(fm, cfg, plan);
    for (const auto& m : rep.models) CHECK(m.dim == 2);
    CHECK(rep.fd_median == 2.0);
    CHECK(rep.subject_metrics.acc > 0.8);
  }

  TEST_CASE("mean of metrics is the arithmetic mean") {
    std::vector<Metrics> ms(4);
    const double accs[4] = {0.1, 0.4, 0.7, 0.9};
    for (std::size_t i = 0; i < 4; ++i) {
      ms[i].acc = accs[i];
      ms[i].sens = 1.0 - accs[i];
    }
    const auto s = mean_metrics(ms);
    CHECK(std::abs(s.acc - 0.525) < 1e-12);
    CHECK(std::abs(s.sens - 0.475) < 1e-12);
  }

  TEST_CASE("feature-level fusion concatenates columns") {
    auto a = cohort(3, 4, 0.0, 1);
    auto b = cohort(3, 7, 0.0, 2);
    for (auto& c : b.columns) c.channel = 3;
    const std::vector<FeatureMatrix> both{a, b};
    const auto fused = feature_level_fuse(both);
    CHECK(fused.cols() == 11);
    CHECK(fused.rows() == a.rows());
    CHECK(fused.columns[4].channel == 3);
    CHECK(fused.x(5, 6) == b.x(5, 2));
    b.epoch_idx[0] = 9;
    const std::vector<FeatureMatrix> bad{a, b};
    CHECK_THROWS_WITH_AS(feature_level_fuse(bad), doctest::Contains("misalignment"), DataError);
  }

  TEST_CASE("fusing a channel with itself doubles the columns; one channel is the identity") {
    const auto a = cohort(3, 4, 0.0, 1);
    const std::vector<FeatureMatrix> twice{a, a};
    CHECK(feature_level_fuse(twice).cols() == 8);
    const std::vector<FeatureMatrix> once{a};
    const auto same = feature_level_fuse(once);
    CHECK(same.x == a.x);
    CHECK(same.columns == a.columns);
    CHECK(same.subject_ids == a.subject_ids);
  }

  TEST_CASE("score-level fusion") {
    const auto f = score_level_fuse(std::vector<double>{0.9, 0.2});
    CHECK(f.mean_probability == doctest::Approx(0.55));
    CHECK(f.label == Label::cad);
    CHECK(score_level_fuse(std::vector<double>{0.3, 0.3, 0.3}).mean_probability == doctest::Approx(0.3));
    CHECK(score_level_fuse(std::vector<double>{0.25, 0.75}).label == Label::cad);
    CHECK(score_level_fuse(std::vector<double>{0.4, 0.6}).label == Label::cad);
    CHECK(score_level_fuse(std::vector<double>{0.2, 0.3, 0.9}).label == Label::normal);
    CHECK(score_level_fuse(std::vector<double>{0.2, 0.3, 0.9}).mean_probability == doctest::Approx(1.4 / 3.0));
    CHECK_THROWS_AS(score_level_fuse(std::vector<double>{}), DataError);
    CHECK(parse_fusion_mode("score") == FusionMode::score_level);
    CHECK(parse_fusion_mode("feature") == FusionMode::feature_level);
    CHECK_THROWS_AS(parse_fusion_mode("both"), ConfigError);
  }

  TEST_CASE("channel subsets") {
    const std::vector<int> seven{7, 1, 2, 3, 4, 5, 6};
    const auto subsets = all_channel_subsets(seven);
    CHECK(subsets.size() == 127);
    CHECK(subsets.front() == std::vector<int>{1});
    CHECK(subsets[7] == std::vector<int>{1, 2});
    CHECK(subsets.back() == std::vector<int>{1, 2, 3, 4, 5, 6, 7});
    std::set<std::vector<int>> unique(subsets.begin(), subsets.end());
    CHECK(unique.size() == 127);
    CHECK_THROWS_AS(all_channel_subsets(std::vector<int>{1, 1}), ConfigError);
  }

  TEST_CASE("combination search ranks subsets deterministically") {
    std::map<int, FeatureMatrix> per;
    per[1] = cohort(8, 2, 0.0, 1);
    per[2] = cohort(8, 2, 6.0, 2);
    per[3] = cohort(8, 2, 0.0, 3);
    for (auto& [ch, fm] : per) {
      fm.y = per[2].y;
      for (auto& c : fm.columns) c.channel = ch;
    }
    const auto cfg = quick_cv(1);
    const auto a = channel_combination_search(per, cfg, all_features(), FusionMode::feature_level);
    const auto b = channel_combination_search(per, cfg, all_features(), FusionMode::feature_level);
    REQUIRE(a.rows.size() == 7);
    CHECK(a.best_by_size.size() == 3);
    CHECK(a.rows[a.best_by_size.at(1)].channels == std::vector<int>{2});
    for (std::size_t i = 0; i < 7; ++i) CHECK(a.rows[i].subject.acc == b.rows[i].subject.acc);
    // Single-channel rows are plain single-channel evaluations.
    const auto single = cross_validate(per.at(2), cfg, all_features());
    const auto& row = a.rows[a.best_by_size.at(1)];
    CHECK(row.subject.acc == single.subject_metrics.acc);
    CHECK(row.epoch.f1 == single.epoch_metrics.f1);
    CHECK(row.fd_median == single.fd_median);
    const auto scored = evaluate_combination(per, std::vector<int>{2, 3}, cfg, all_features(), FusionMode::score_level);
    CHECK(scored.models.size() == 5);
    CHECK(scored.leakage_violations == 0);
  }

  TEST_CASE("held-out prediction") {
    const auto train = cohort(10, 3, 6.0, 8);
    SUBCASE("training subjects are recalled") {
      const auto rows = [&] {
        std::vector<std::size_t> r;
        for (std::size_t i = 0; i < 30; ++i) r.push_back(i);
        return r;
      }();
      const auto preds = train_full_and_predict(train, train.select_rows(rows), quick_cv(), all_features());
      REQUIRE(preds.size() == 10);
      for (const auto& p : preds) {
        CHECK(p.label == p.truth);
        CHECK(p.epoch_labels.size() == 3);
        CHECK(p.epoch_probabilities.size() == 3);
      }
    }
    SUBCASE("new subjects") {
      auto held = cohort(5, 3, 6.0, 9);
      for (auto& s : held.subject_ids) s = "h" + s;
      const auto preds = train_full_and_predict(train, held, quick_cv(), all_features());
      REQUIRE(preds.size() == 10);
      std::size_t right = 0;
      for (const auto& p : preds) right += p.label == p.truth ? 1 : 0;
      CHECK(right >= 9);
    }
    SUBCASE("empty held-out set") {
      const auto preds = train_full_and_predict(train, train.select_rows(std::vector<std::size_t>{}), quick_cv(),
                                                all_features());
      CHECK(preds.empty());
    }
    SUBCASE("column mismatch") {
      auto held = cohort(5, 3, 6.0, 9);
      held.columns[0].description = "other";
      CHECK_THROWS_AS(train_full_and_predict(train, held, quick_cv(), all_features()), ConfigError);
    }
  }

  TEST_CASE("configuration checks") {
    CvConfig cfg;
    cfg.k = 1;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = {};
    cfg.classifier = KnnSpec{0, DistanceMetric::cosine};
    CHECK_THROWS_AS(validate(cfg), ConfigError);
  }
}
