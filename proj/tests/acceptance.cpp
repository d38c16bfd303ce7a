// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <thread>

#include "oracles.hpp"
#include "pcg/cepstral.hpp"
#include "pcg/evaluate.hpp"
#include "pcg/features.hpp"
#include "pcg/learn.hpp"
#include "pcg/rng.hpp"
#include "pcg/spectral.hpp"
#include "pcg/synth.hpp"

using namespace pcg;

namespace {

using Clock = std::chrono::steady_clock;

unsigned hw_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = "failed: " + what;
      pass = false;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome numeric_identities() {
  Outcome o;
  const auto t0 = Clock::now();
  for (std::size_t n : {8u, 64u, 1024u, 1025u}) {
    const auto w = hanning_window(n);
    o.require(w.size() == n + 1, "window length");
    o.require(std::abs(w.front()) < 1e-9 && std::abs(w.back()) < 1e-9, "window endpoints");
    if (n % 2 == 0) o.require(std::abs(w[n / 2] - 1.0) < 1e-9, "window midpoint");
    for (std::size_t i = 0; i <= n; ++i) o.require(std::abs(w[i] - w[n - i]) < 1e-9, "window symmetry");
  }
  Rng rng(1);
  double worst_dct = 0.0;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x(1 + rng.below(40));
    for (auto& v : x) v = rng.uniform(-30.0, 10.0);
    const auto back = inverse_dct_ii(dct_ii(x));
    for (std::size_t i = 0; i < x.size(); ++i) worst_dct = std::max(worst_dct, std::abs(back[i] - x[i]));
  }
  o.require(worst_dct < 1e-9, "DCT round trip");
  double worst_sum = 0.0;
  for (auto scale : {FilterScale::linear, FilterScale::mel}) {
    for (std::size_t n_fft : {256u, 512u, 1024u, 4096u}) {
      const auto fb = build_filterbank(CepstralConfig::for_scale(scale), n_fft, 2000.0);
      for (std::size_t b = 0; b < fb.responses.cols(); ++b) {
        const double f = static_cast<double>(b) * 2000.0 / static_cast<double>(n_fft);
        if (f < fb.centers_hz.front() || f > fb.centers_hz.back()) continue;
        double s = 0.0;
        for (std::size_t k = 0; k < fb.size(); ++k) s += fb.responses(k, b);
        worst_sum = std::max(worst_sum, std::abs(s - 1.0));
      }
    }
  }
  o.require(worst_sum < 1e-9, "partition of unity");
  const double secs = seconds_since(t0);
  o.require(secs < 1.0, "runtime");
  if (o.pass) o.detail = fmt("dct err %.1e, partition err %.1e, %.3f s", worst_dct, worst_sum, secs);
  return o;
}

Outcome parseval() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    std::vector<double> x(20000);
    for (auto& v : x) v = rng.normal();
    const auto psd = welch_psd(x, 2000.0);
    const double total = integrate_bins(psd, 0, psd.density.size() - 1);
    worst = std::max(worst, std::abs(total - 1.0));
  }
  o.require(worst <= 0.05, fmt("worst deviation %.4f", worst));
  const double secs = seconds_since(t0);
  o.require(secs < 10.0, "runtime");
  if (o.pass) o.detail = fmt("worst |integral - 1| = %.4f over 100 seeds, %.2f s", worst, secs);
  return o;
}

FeatureSpec lfcc(int frames, int hi) {
  FeatureSpec s;
  s.family = FeatureFamily::lfcc;
  s.cepstral.num_frames = frames;
  s.cepstral.coeff_lo = 0;
  s.cepstral.coeff_hi = hi;
  return s;
}

/// Channel-wise LFCC settings of the four-channel fusion.
std::map<int, FeatureSpec> fusion_specs() {
  return {{2, lfcc(108, 7)}, {3, lfcc(28, 6)}, {6, lfcc(20, 4)}, {7, lfcc(110, 5)}};
}

Outcome dimensions() {
  Outcome o;
  const auto specs = fusion_specs();
  const std::size_t ch2 = specs.at(2).dimension();
  std::size_t fused = 0;
  for (const auto& [c, s] : specs) fused += s.dimension();
  o.require(ch2 == 864, "channel-2 dimension");
  o.require(fused == 1820, "fused dimension");
  // The extractor must produce what the spec arithmetic says.
  Rng rng(2);
  std::vector<double> epoch(3000);
  for (auto& v : epoch) v = rng.normal();
  o.require(epoch_features(epoch, specs.at(2)).size() == 864, "extracted channel-2 vector");
  std::size_t extracted = 0;
  for (const auto& [c, s] : specs) extracted += epoch_features(epoch, s).size();
  o.require(extracted == 1820, "extracted fused vector");
  if (o.pass) o.detail = fmt("channel 2: %.0f, fused 2-3-6-7: %.0f", static_cast<double>(ch2), static_cast<double>(fused));
  return o;
}

Outcome frame_length() {
  Outcome o;
  const auto layout = frame_layout(2100, 20);  // 1.05 s at 2 kHz
  const double ms = 1000.0 * static_cast<double>(layout.length) / 2000.0;
  o.require(std::abs(ms - 100.0) / 100.0 <= 0.01, fmt("frame %.2f ms", ms));
  if (o.pass) o.detail = fmt("%.1f ms frames, hop %.1f ms", ms, 1000.0 * static_cast<double>(layout.hop) / 2000.0);
  return o;
}

Outcome selection_oracles() {
  Outcome o;
  Rng rng(3);
  std::size_t failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t per_class = 15 + rng.below(26);
    const std::size_t d = 2 + rng.below(11);
    const std::size_t label_col = rng.below(d);
    std::size_t const_col = rng.below(d);
    if (const_col == label_col) const_col = (const_col + 1) % d;
    const double level = rng.uniform(-5.0, 5.0);
    FeatureMatrix fm;
    fm.x = Matrix(2 * per_class, d);
    for (std::size_t r = 0; r < 2 * per_class; ++r) {
      const Label l = r % 2 == 0 ? Label::cad : Label::normal;
      fm.y.push_back(l);
      fm.subject_ids.push_back("s" + std::to_string(r));
      fm.epoch_idx.push_back(0);
      for (std::size_t c = 0; c < d; ++c) {
        const double shift = l == Label::cad ? 0.5 * static_cast<double>(c % 3) : 0.0;
        fm.x(r, c) = c == label_col ? (l == Label::cad ? 1.0 : 0.0) : c == const_col ? level : rng.normal() + shift;
      }
    }
    for (std::size_t c = 0; c < d; ++c) fm.columns.push_back({1, "f" + std::to_string(c)});

    bool ok = true;
    const auto ranked = mrmr_rank(fm);
    ok = ok && ranked.order.front() == label_col;
    // Relevance of every column against brute-force counting.
    std::vector<int> y;
    for (auto l : fm.y) y.push_back(l == Label::cad ? 1 : 0);
    double best_other = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const auto lv = oracle::discretize(fm.x.column(c), 10);
      const double mi = oracle::mutual_information(lv, y);
      ok = ok && std::abs(mutual_information(discretize_equal_frequency(fm.x.column(c), 10), y) - mi) < 1e-12;
      if (c != label_col) best_other = std::max(best_other, mi);
    }
    ok = ok && best_other < 1.0;
    ok = ok && ranked.order == oracle::mrmr_order(fm, 10);
    const auto relief = relieff_rank(fm, 10);
    ok = ok && relief.scores[const_col] == 0.0;
    if (!ok) ++failures;
  }
  o.require(failures == 0, std::to_string(failures) + " of 1000 trials failed");
  if (o.pass) o.detail = "1000 trials, 0 failures";
  return o;
}

Outcome svm_checks() {
  Outcome o;
  double worst_eq = 0.0, worst_gap = 0.0;
  std::size_t models = 0;
  auto check_model = [&](const Matrix& x, const std::vector<Label>& y, const KernelSpec& k) {
    const auto r = svm_train_detailed(x, y, k);
    ++models;
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      o.require(r.alpha[i] >= 0.0 && r.alpha[i] <= r.model.kernel.c, "box constraint");
      s += r.alpha[i] * (y[i] == Label::cad ? 1.0 : -1.0);
    }
    worst_eq = std::max(worst_eq, std::abs(s));
    worst_gap = std::max(worst_gap, duality_gap(r, x, y).gap());
    return r.model;
  };

  Matrix xor_x(4, 2);
  const double pts[4][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  for (std::size_t i = 0; i < 4; ++i) {
    xor_x(i, 0) = pts[i][0];
    xor_x(i, 1) = pts[i][1];
  }
  const std::vector<Label> xor_y{Label::cad, Label::cad, Label::normal, Label::normal};
  KernelSpec rbf;
  rbf.gamma = 1.0;
  rbf.c = 10.0;
  const auto xm = check_model(xor_x, xor_y, rbf);
  for (std::size_t i = 0; i < 4; ++i) o.require(svm_predict(xm, xor_x.row(i)) == xor_y[i], "XOR");

  // Unit-variance blobs centred at +-4 sigma along the first axis, with draws
  // inside the 4 sigma band around the separating plane rejected so the
  // classes really are separated by that margin.
  KernelSpec linear;
  linear.kind = KernelKind::linear;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    auto blob = [&](std::size_t per_class) {
      Matrix x(2 * per_class, 3);
      std::vector<Label> y;
      for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const bool cad = i % 2 == 0;
        y.push_back(cad ? Label::cad : Label::normal);
        double first = 0.0;
        do first = rng.normal() + (cad ? 4.0 : -4.0);
        while (std::abs(first) < 2.0);
        x(i, 0) = first;
        for (std::size_t j = 1; j < 3; ++j) x(i, j) = rng.normal();
      }
      return std::pair{x, y};
    };
    const auto [tx, ty] = blob(100);
    const auto [vx, vy] = blob(100);
    const auto m = check_model(tx, ty, linear);
    for (std::size_t i = 0; i < vy.size(); ++i) o.require(svm_predict(m, vx.row(i)) == vy[i], "blob accuracy");
    for (std::size_t i = 0; i < ty.size(); ++i) o.require(svm_predict(m, tx.row(i)) == ty[i], "blob accuracy");
  }
  // Overlapping data with the default RBF kernel exercises bounded multipliers.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(100 + seed);
    Matrix x(120, 5);
    std::vector<Label> y;
    for (std::size_t i = 0; i < 120; ++i) {
      y.push_back(i % 2 == 0 ? Label::cad : Label::normal);
      for (std::size_t j = 0; j < 5; ++j) x(i, j) = rng.normal() + (i % 2 == 0 ? 0.5 : 0.0);
    }
    check_model(x, y, KernelSpec{});
  }
  o.require(worst_eq < 1e-6, fmt("|sum alpha y| = %.2e", worst_eq));
  o.require(worst_gap < 1e-2, fmt("duality gap %.2e", worst_gap));
  if (o.pass) {
    o.detail = fmt("%.0f models, max |sum alpha y| %.1e, max gap %.1e; XOR and blobs 100%%",
                   static_cast<double>(models), worst_eq, worst_gap);
  }
  return o;
}

struct EndToEnd {
  FeatureMatrix fused;
  EvaluationReport report;
  double seconds = 0.0;
};

EndToEnd run_end_to_end() {
  EndToEnd e;
  const auto t0 = Clock::now();
  const SynthParams params;  // murmur 0.3, ambient noise -20 dB re S1
  const auto ds = synth_dataset(40, params, 7);
  std::vector<Label> labels;
  for (const auto& entry : ds.manifest.entries) labels.push_back(entry.label);
  const auto epochs = preprocess_recordings(ds.recordings, labels, ds.annotations, {}, hw_jobs());
  const auto per = extract_features(epochs, fusion_specs(), hw_jobs());
  std::vector<FeatureMatrix> parts;
  for (const auto& [c, m] : per) parts.push_back(m);
  e.fused = feature_level_fuse(parts);

  CvConfig cfg;
  cfg.iterations = 20;
  cfg.k = 5;
  cfg.rng_seed = 7;
  cfg.jobs = hw_jobs();
  SelectionPlan plan;
  plan.method = RankingMethod::relieff;
  plan.search = true;
  plan.step = 20;
  e.report = cross_validate(e.fused, cfg, plan);
  e.seconds = seconds_since(t0);
  return e;
}

Outcome end_to_end(const EndToEnd& e) {
  Outcome o;
  const auto& s = e.report.subject_metrics;
  const double sens_spec = 0.5 * (s.sens + s.spec);
  o.require(e.fused.cols() == 1820, "fused dimension");
  o.require(s.acc >= 0.90, fmt("subject accuracy %.3f", s.acc));
  o.require(sens_spec >= 0.75, fmt("Sens-Spec %.3f", sens_spec));
  o.require(e.seconds < 600.0, fmt("wall clock %.0f s", e.seconds));
  if (o.pass) {
    o.detail = fmt("subject acc %.3f, Sens-Spec %.3f, FD median %.0f, %.0f s", s.acc, sens_spec, e.report.fd_median,
                   e.seconds);
  }
  return o;
}

Outcome cv_protocol(const EndToEnd& e) {
  Outcome o;
  o.require(e.report.models.size() == 100, "model count");
  o.require(e.report.leakage_violations == 0, "leakage");
  std::size_t overlaps = 0;
  for (const auto& m : e.report.models) {
    for (const auto& t : m.test_subjects) {
      overlaps += std::count(m.train_subjects.begin(), m.train_subjects.end(), t);
    }
  }
  o.require(overlaps == 0, "train/test subject overlap");

  // Null: subject labels shuffled so that each permuted class holds half of
  // each true class, which makes the permuted labels independent of the truth.
  FeatureMatrix null = e.fused;
  std::vector<std::string> cad, normal;
  for (std::size_t r = 0; r < null.rows(); ++r) {
    auto& bucket = null.y[r] == Label::cad ? cad : normal;
    if (std::find(bucket.begin(), bucket.end(), null.subject_ids[r]) == bucket.end()) bucket.push_back(null.subject_ids[r]);
  }
  Rng rng(2024);
  rng.shuffle(std::span<std::string>(cad));
  rng.shuffle(std::span<std::string>(normal));
  std::map<std::string, Label> relabel;
  for (std::size_t i = 0; i < cad.size(); ++i) relabel[cad[i]] = i < cad.size() / 2 ? Label::cad : Label::normal;
  for (std::size_t i = 0; i < normal.size(); ++i) relabel[normal[i]] = i < normal.size() / 2 ? Label::cad : Label::normal;
  for (std::size_t r = 0; r < null.rows(); ++r) null.y[r] = relabel.at(null.subject_ids[r]);

  CvConfig cfg;
  cfg.iterations = 20;
  cfg.rng_seed = 11;
  cfg.jobs = hw_jobs();
  SelectionPlan plan;
  plan.method = RankingMethod::none;
  const auto rep = cross_validate(null, cfg, plan);
  o.require(rep.models.size() == 100 && rep.leakage_violations == 0, "null run protocol");
  o.require(std::abs(rep.subject_metrics.acc - 0.5) <= 0.1, fmt("null accuracy %.3f", rep.subject_metrics.acc));
  if (o.pass) o.detail = fmt("100 models, 0 leakage; permuted-label subject acc %.3f", rep.subject_metrics.acc);
  return o;
}

Outcome throughput() {
  Outcome o;
  const SynthParams params;
  std::map<int, FeatureSpec> specs;
  for (int c = 1; c <= 7; ++c) specs[c] = lfcc(108, 7);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = synth_subject(seed % 2 ? Label::cad : Label::normal, params, seed);
    const auto t0 = Clock::now();
    const auto epochs = preprocess_subject(s.recording, s.annotations.spans, Label::cad);
    const auto feats = extract_features(epochs, specs, 1);
    worst = std::max(worst, seconds_since(t0));
    o.require(feats.size() == 7 && feats.at(1).rows() == 3, "feature shape");
  }
  o.require(worst < 1.0, fmt("%.3f s per subject", worst));
  if (o.pass) o.detail = fmt("slowest of 5 subjects: %.3f s (7 channels, one thread)", worst);
  return o;
}

/// Two-sided p of the midrank sum by enumerating every n-subset.
double enumerated_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t N = pooled.size(), n = a.size();
  std::vector<double> rank(N);
  for (std::size_t i = 0; i < N; ++i) {
    double less = 0, eq = 0;
    for (double v : pooled) {
      less += v < pooled[i];
      eq += v == pooled[i];
    }
    rank[i] = less + (eq + 1) / 2.0;
  }
  const double mean = static_cast<double>(n) * static_cast<double>(N + 1) / 2.0;
  const double obs = std::abs(std::accumulate(rank.begin(), rank.begin() + static_cast<long>(n), 0.0) - mean);
  std::uint64_t hit = 0, all = 0;
  // Gosper's hack walks every mask with exactly n bits set.
  std::uint64_t mask = (std::uint64_t{1} << n) - 1;
  const std::uint64_t limit = std::uint64_t{1} << N;
  while (mask < limit) {
    double s = 0;
    for (std::uint64_t m = mask; m; m &= m - 1) s += rank[static_cast<std::size_t>(std::countr_zero(m))];
    ++all;
    if (std::abs(s - mean) >= obs - 1e-9) ++hit;
    const std::uint64_t c = mask & (~mask + 1);
    const std::uint64_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
  return static_cast<double>(hit) / static_cast<double>(all);
}

Outcome wilcoxon() {
  Outcome o;
  Rng rng(5);
  double worst = 0.0;
  std::size_t configs = 0;
  for (std::size_t n = 1; n <= 10; ++n) {
    for (std::size_t m = 1; m <= 10; ++m) {
      for (int tied = 0; tied < 2; ++tied) {
        std::vector<double> a(n), b(m);
        for (auto& v : a) v = tied ? static_cast<double>(rng.below(5)) : rng.normal() + 0.5;
        for (auto& v : b) v = tied ? static_cast<double>(rng.below(5)) : rng.normal();
        const double want = enumerated_p(a, b);
        const double got = wilcoxon_rank_sum(a, b).p_value;
        worst = std::max(worst, std::abs(got - want) / want);
        ++configs;
      }
    }
  }
  o.require(worst <= 0.10, fmt("worst relative error %.3g", worst));
  if (o.pass) o.detail = fmt("%.0f configurations, worst relative error %.1e", static_cast<double>(configs), worst);
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const char* name, const std::function<Outcome()>& fn) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s  %-22s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  };

  report("numeric-identities", numeric_identities);
  report("parseval", parseval);
  report("dimensions", dimensions);
  report("frame-length", frame_length);
  report("selection-oracles", selection_oracles);
  report("svm", svm_checks);
  report("wilcoxon-exact", wilcoxon);
  report("throughput", throughput);

  EndToEnd e2e;
  bool have_e2e = false;
  try {
    e2e = run_end_to_end();
    have_e2e = true;
  } catch (const std::exception& ex) {
    std::printf("FAIL  end-to-end             exception: %s\n", ex.what());
    ++failures;
  }
  if (have_e2e) {
    report("end-to-end", [&] { return end_to_end(e2e); });
    report("cv-protocol", [&] { return cv_protocol(e2e); });
  } else {
    std::printf("FAIL  cv-protocol            end-to-end run unavailable\n");
    ++failures;
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
