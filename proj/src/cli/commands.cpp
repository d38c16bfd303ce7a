#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "pcg/cli.hpp"
#include "pcg/error.hpp"
#include "pcg/log.hpp"
#include "report.hpp"
#include "stages.hpp"

namespace pcg::cli {

using nlohmann::json;

namespace {

std::string kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::config: return "config";
    case ErrorKind::data: return "data";
    case ErrorKind::numeric: return "numeric";
  }
  return "numeric";
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::config: return 1;
    case ErrorKind::data: return 2;
    case ErrorKind::numeric: return 3;
  }
  return 3;
}

int fail(std::ostream& err, ErrorKind kind, const std::string& message) {
  err << json{{"error", {{"kind", kind_name(kind)}, {"message", message}, {"exit_code", exit_code(kind)}}}}.dump()
      << "\n";
  return exit_code(kind);
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string line;
  for (const auto& c : cells) {
    if (!line.empty()) line += ',';
    line += c;
  }
  return line + "\n";
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string channel_list(const std::vector<int>& channels) {
  std::string s;
  for (int c : channels) s += (s.empty() ? "" : "-") + std::to_string(c);
  return s;
}

std::vector<int> union_channels(const PipelineConfig& cfg, std::vector<int> extra) {
  std::set<int> all(extra.begin(), extra.end());
  for (int c : cfg.fusion.channels) all.insert(c);
  return {all.begin(), all.end()};
}

// ---------------------------------------------------------------------------

json cmd_synth(const PipelineConfig& cfg) {
  if (cfg.paths.dataset_dir.empty()) throw ConfigError("paths.dataset_dir is not set");
  const auto ds = synth_dataset(cfg.synth.n_per_class, cfg.synth.params, cfg.seed, cfg.synth.n_heldout_per_class);
  write_dataset(ds, cfg.paths.dataset_dir);
  return {{"recordings", ds.recordings.size()},
          {"spans", ds.annotations.spans.size()},
          {"manifest", (cfg.paths.dataset_dir / "manifest.csv").generic_string()},
          {"annotations", (cfg.paths.dataset_dir / "annotations.csv").generic_string()}};
}

json cmd_preprocess(const PipelineConfig& cfg) {
  const Inputs in = load_inputs(cfg);
  json out = json::object();
  for (Cohort c : {Cohort::train, Cohort::heldout}) {
    if (in.manifest.cohort(c).empty()) continue;
    StageResult info;
    const auto epochs = cohort_epochs(cfg, in, c, &info);
    out[c == Cohort::train ? "train" : "heldout"] = {
        {"epochs", epochs.size()}, {"cache_file", info.cache_file.generic_string()}, {"cache_hit", info.cache_hit}};
  }
  return out;
}

void write_feature_csv(const FeatureMatrix& fm, const std::filesystem::path& path) {
  std::string text = "subject_id,epoch_idx,label";
  for (const auto& c : fm.columns) text += "," + c.description;
  text += "\n";
  for (std::size_t r = 0; r < fm.rows(); ++r) {
    text += fm.subject_ids[r] + "," + std::to_string(fm.epoch_idx[r]) + "," + std::string(to_string(fm.y[r]));
    for (double v : fm.x.row(r)) text += "," + fmt(v);
    text += "\n";
  }
  write_text(path, text);
}

json cmd_extract(const PipelineConfig& cfg) {
  const Inputs in = load_inputs(cfg);
  const auto channels = union_channels(cfg, cfg.extracted_channels());
  json out = json::object();
  for (Cohort c : {Cohort::train, Cohort::heldout}) {
    if (in.manifest.cohort(c).empty()) continue;
    const std::string name = c == Cohort::train ? "train" : "heldout";
    std::vector<StageResult> info;
    const auto per_channel = cohort_features(cfg, in, c, channels, &info);
    json list = json::array();
    std::size_t i = 0;
    for (const auto& [ch, fm] : per_channel) {
      const auto csv = cfg.paths.output_dir / "features" / ("ch" + std::to_string(ch) + "-" + name + ".csv");
      write_feature_csv(fm, csv);
      list.push_back({{"channel", ch},
                      {"rows", fm.rows()},
                      {"cols", fm.cols()},
                      {"csv", csv.generic_string()},
                      {"cache_hit", info[i++].cache_hit}});
    }
    out[name] = list;
  }
  return out;
}

json cmd_evaluate(const PipelineConfig& cfg) {
  const Inputs in = load_inputs(cfg);
  const auto per_channel = cohort_features(cfg, in, Cohort::train, cfg.fusion.channels);
  const auto report = evaluate_combination(per_channel, cfg.fusion.channels, cfg.cv, cfg.selection, cfg.fusion.mode);
  json doc = report_envelope("evaluate", to_json(cfg));
  doc["channels"] = cfg.fusion.channels;
  doc["fusion"] = to_string(cfg.fusion.mode);
  doc["results"] = evaluation_json(report);
  const auto path = cfg.paths.output_dir / "report.json";
  write_json(path, doc);
  return {{"report", path.generic_string()},
          {"epoch", summary_json(report.epoch_metrics)},
          {"subject", summary_json(report.subject_metrics)},
          {"fd_median", report.fd_median}};
}

json cmd_search(const PipelineConfig& cfg) {
  const Inputs in = load_inputs(cfg);
  std::vector<int> channels = cfg.fusion.search_channels.empty() ? cfg.extracted_channels() : cfg.fusion.search_channels;
  for (const auto& subset : cfg.fusion.search_family) channels.insert(channels.end(), subset.begin(), subset.end());
  std::sort(channels.begin(), channels.end());
  channels.erase(std::unique(channels.begin(), channels.end()), channels.end());

  const auto per_channel = cohort_features(cfg, in, Cohort::train, channels);
  auto family = cfg.fusion.search_family;
  if (family.empty()) family = all_channel_subsets(channels);
  const auto table = channel_combination_search(per_channel, cfg.cv, cfg.selection, cfg.fusion.mode, family);

  json doc = report_envelope("search", to_json(cfg));
  doc["fusion"] = to_string(cfg.fusion.mode);
  doc["results"] = combinations_json(table);
  write_json(cfg.paths.output_dir / "combinations.json", doc);

  std::string csv = "channels,size,epoch_acc,epoch_f1,subject_sens,subject_spec,subject_acc,subject_f1,fd_median,best_of_size\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const bool best = table.best_by_size.at(row.channels.size()) == r;
    csv += csv_row({channel_list(row.channels), std::to_string(row.channels.size()), fmt(row.epoch.acc),
                    fmt(row.epoch.f1), fmt(row.subject.sens), fmt(row.subject.spec), fmt(row.subject.acc),
                    fmt(row.subject.f1), fmt(row.fd_median), best ? "1" : "0"});
  }
  write_text(cfg.paths.output_dir / "combinations.csv", csv);
  json best = json::object();
  for (const auto& [size, idx] : table.best_by_size) best[std::to_string(size)] = table.rows[idx].channels;
  return {{"rows", table.rows.size()}, {"best_by_size", best},
          {"table", (cfg.paths.output_dir / "combinations.csv").generic_string()}};
}

std::vector<SubjectPrediction> predict_fused(const PipelineConfig& cfg, const std::map<int, FeatureMatrix>& train,
                                             const std::map<int, FeatureMatrix>& heldout) {
  std::vector<FeatureMatrix> tr, ho;
  for (int c : cfg.fusion.channels) {
    tr.push_back(train.at(c));
    ho.push_back(heldout.at(c));
  }
  if (cfg.fusion.mode == FusionMode::feature_level) {
    return train_full_and_predict(feature_level_fuse(tr), feature_level_fuse(ho), cfg.cv, cfg.selection);
  }
  // Score level: average per-epoch probabilities across channels, then vote.
  std::vector<std::vector<SubjectPrediction>> per;
  for (std::size_t i = 0; i < tr.size(); ++i) per.push_back(train_full_and_predict(tr[i], ho[i], cfg.cv, cfg.selection));
  std::vector<SubjectPrediction> out = per.front();
  for (std::size_t s = 0; s < out.size(); ++s) {
    auto& p = out[s];
    double total = 0.0;
    for (std::size_t e = 0; e < p.epoch_probabilities.size(); ++e) {
      std::vector<double> probs;
      for (const auto& ch : per) probs.push_back(ch[s].epoch_probabilities[e]);
      const auto fused = score_level_fuse(probs);
      p.epoch_probabilities[e] = fused.mean_probability;
      p.epoch_labels[e] = fused.label;
      total += fused.mean_probability;
    }
    p.mean_probability = total / static_cast<double>(p.epoch_probabilities.size());
    p.label = majority_vote(p.epoch_labels, cfg.cv.vote);
  }
  return out;
}

json cmd_predict(const PipelineConfig& cfg) {
  const Inputs in = load_inputs(cfg);
  if (in.manifest.cohort(Cohort::heldout).empty()) throw DataError("manifest has no held-out cohort");
  const auto train = cohort_features(cfg, in, Cohort::train, cfg.fusion.channels);
  const auto heldout = cohort_features(cfg, in, Cohort::heldout, cfg.fusion.channels);
  const auto predictions = predict_fused(cfg, train, heldout);

  Confusion c;
  for (const auto& p : predictions) c.add(p.truth, p.label);
  const auto m = compute_metrics(c);
  json doc = report_envelope("predict", to_json(cfg));
  doc["channels"] = cfg.fusion.channels;
  doc["predictions"] = predictions_json(predictions);
  doc["subject_metrics"] = metrics_json(m);
  write_json(cfg.paths.output_dir / "predictions.json", doc);

  std::string csv = "subject_id,predicted,truth,mean_probability\n";
  for (const auto& p : predictions) {
    csv += csv_row({p.subject_id, std::string(to_string(p.label)), std::string(to_string(p.truth)),
                    fmt(p.mean_probability)});
  }
  write_text(cfg.paths.output_dir / "predictions.csv", csv);
  return {{"subjects", predictions.size()}, {"subject", metrics_json(m)},
          {"predictions", (cfg.paths.output_dir / "predictions.csv").generic_string()}};
}

// ---------------------------------------------------------------------------
// report

struct ClassStats {
  std::vector<double> mean, std;
};

ClassStats column_stats(const std::vector<std::vector<double>>& rows) {
  ClassStats s;
  if (rows.empty()) return s;
  const std::size_t d = rows.front().size();
  s.mean.assign(d, 0.0);
  s.std.assign(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
  }
  for (auto& v : s.mean) v /= static_cast<double>(rows.size());
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) s.std[j] += (r[j] - s.mean[j]) * (r[j] - s.mean[j]);
  }
  for (auto& v : s.std) v = std::sqrt(v / static_cast<double>(rows.size()));
  return s;
}

json cmd_report(const PipelineConfig& cfg) {
  const Inputs in = load_inputs(cfg);
  const auto epochs = cohort_epochs(cfg, in, Cohort::train);
  const auto dir = cfg.paths.output_dir / "report";
  json files = json::array();
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    files.push_back((dir / name).generic_string());
  };

  for (int ch : union_channels(cfg, cfg.extracted_channels())) {
    const std::string tag = "ch" + std::to_string(ch);
    std::vector<std::vector<double>> psd_db[2];
    std::vector<std::vector<double>> ceps[2];
    std::map<std::string, std::pair<Label, std::vector<std::vector<double>>>> bands_by_subject;
    std::vector<double> freqs;

    FeatureSpec ceps_spec = cfg.spec_for(ch);
    if (ceps_spec.family == FeatureFamily::psd) {
      ceps_spec.family = FeatureFamily::lfcc;
      ceps_spec.cepstral.scale = FilterScale::linear;
    }

    for (const auto& e : epochs) {
      if (e.channel_id != ch) continue;
      const int cls = e.label == Label::cad ? 0 : 1;
      const auto psd = welch_psd(e.samples, cfg.preprocess.target_fs_hz);
      freqs = psd.freqs_hz;
      std::vector<double> db(psd.density.size());
      for (std::size_t k = 0; k < db.size(); ++k) db[k] = 10.0 * std::log10(std::max(psd.density[k], 1e-20));
      psd_db[cls].push_back(std::move(db));
      ceps[cls].push_back(epoch_features(e.samples, ceps_spec));

      // Power in 100 Hz bands up to 1 kHz.
      std::vector<double> bands;
      const auto per_band = static_cast<std::size_t>(std::llround(100.0 / psd.bin_spacing_hz));
      for (std::size_t b = 0; b < 10; ++b) {
        const std::size_t last = std::min((b + 1) * per_band, psd.density.size() - 1);
        bands.push_back(integrate_bins(psd, b * per_band, last));
      }
      auto& slot = bands_by_subject[e.subject_id];
      slot.first = e.label;
      slot.second.push_back(std::move(bands));
    }
    if (psd_db[0].empty() && psd_db[1].empty()) continue;

    // PSD mean +- std per class.
    const auto cad = column_stats(psd_db[0]);
    const auto nor = column_stats(psd_db[1]);
    std::vector<Series> series;
    if (!cad.mean.empty()) series.push_back({"CAD", "#d95f02", freqs, cad.mean, cad.std});
    if (!nor.mean.empty()) series.push_back({"Normal", "#1b9e77", freqs, nor.mean, nor.std});
    emit("psd_" + tag + ".svg", svg_band_plot("Welch PSD, channel " + std::to_string(ch), "frequency (Hz)",
                                              "power density (dB/Hz)", series));
    std::string csv = "freq_hz,cad_mean_db,cad_std_db,normal_mean_db,normal_std_db\n";
    for (std::size_t k = 0; k < freqs.size(); ++k) {
      csv += csv_row({fmt(freqs[k]), cad.mean.empty() ? "" : fmt(cad.mean[k]), cad.std.empty() ? "" : fmt(cad.std[k]),
                      nor.mean.empty() ? "" : fmt(nor.mean[k]), nor.std.empty() ? "" : fmt(nor.std[k])});
    }
    emit("psd_" + tag + ".csv", csv);

    // Class-mean cepstra as frames x coefficients.
    const std::size_t nc = ceps_spec.cepstral.num_coefficients();
    for (int cls = 0; cls < 2; ++cls) {
      if (ceps[cls].empty()) continue;
      const auto stats = column_stats(ceps[cls]);
      std::vector<std::vector<double>> grid;
      for (std::size_t c = 0; c < nc; ++c) {
        std::vector<double> row;
        for (std::size_t f = 0; f * nc + c < stats.mean.size(); ++f) row.push_back(stats.mean[f * nc + c]);
        grid.push_back(std::move(row));
      }
      const std::string cname = cls == 0 ? "cad" : "normal";
      emit(std::string(to_string(ceps_spec.family)) + "_" + tag + "_" + cname + ".svg",
           svg_heatmap("Mean " + std::string(to_string(ceps_spec.family)) + ", " + (cls == 0 ? "CAD" : "Normal") +
                           ", channel " + std::to_string(ch),
                       "frame", "coefficient (top = c" + std::to_string(ceps_spec.cepstral.coeff_lo) + ")", grid));
    }

    // Per-subject band powers with rank-sum tests.
    std::vector<BoxGroup> groups(10);
    for (std::size_t b = 0; b < 10; ++b) groups[b].label = std::to_string(b * 100) + "-" + std::to_string((b + 1) * 100);
    for (const auto& [subject, entry] : bands_by_subject) {
      for (std::size_t b = 0; b < 10; ++b) {
        double mean = 0.0;
        for (const auto& v : entry.second) mean += v[b];
        mean /= static_cast<double>(entry.second.size());
        (entry.first == Label::cad ? groups[b].a : groups[b].b).push_back(10.0 * std::log10(std::max(mean, 1e-20)));
      }
    }
    std::string tests = "band_hz,n_cad,n_normal,statistic,z,p_value,exact,stars\n";
    for (auto& g : groups) {
      if (g.a.empty() || g.b.empty()) continue;
      const auto t = wilcoxon_rank_sum(g.a, g.b);
      g.p_value = t.p_value;
      tests += csv_row({g.label, std::to_string(g.a.size()), std::to_string(g.b.size()), fmt(t.statistic), fmt(t.z),
                        fmt(t.p_value), t.exact ? "1" : "0", significance_stars(t.p_value)});
    }
    emit("band_tests_" + tag + ".csv", tests);
    emit("boxplot_" + tag + ".svg", svg_boxplot("Subject band power, channel " + std::to_string(ch),
                                                "band power (dB)", "CAD", "Normal", groups));
  }

  // Metric tables from earlier runs, when present.
  const auto report_path = cfg.paths.output_dir / "report.json";
  if (std::filesystem::exists(report_path)) {
    std::ifstream rin(report_path);
    const json r = json::parse(rin);
    std::string csv = "level,sens,spec,acc,f1,sens_spec_mean\n";
    for (const char* level : {"epoch", "subject"}) {
      const auto& m = r.at("results").at(level);
      csv += csv_row({level, fmt(m.at("sens")), fmt(m.at("spec")), fmt(m.at("acc")), fmt(m.at("f1")),
                      fmt(m.at("sens_spec_mean"))});
    }
    emit("metrics.csv", csv);
  }
  return {{"files", files}};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-channel PCG screening pipeline", "pcg"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  bool strict = false;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--strict", strict, "enforce the investigated parameter grids and epoch rules");
  app.add_flag("-v,--verbose", verbose, "info-level logging on stderr");

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"synth", "generate a synthetic dataset"},
      {"preprocess", "filter, resample and segment epochs (cached)"},
      {"extract", "feature matrices per channel (cached)"},
      {"evaluate", "repeated subject-grouped cross-validation report"},
      {"search", "channel-combination table"},
      {"predict", "train on the training cohort, label the held-out cohort"},
      {"report", "PSD/cepstral summary plots and tables"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    return fail(err, ErrorKind::config, e.what());
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    if (verbose) log::set_level(log::Level::info);
    json doc = json::object();
    std::filesystem::path base = std::filesystem::current_path();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config " + config_path);
      try {
        doc = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
      }
      base = std::filesystem::absolute(config_path).parent_path();
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    if (seed) doc["seed"] = *seed;
    if (jobs) doc["jobs"] = *jobs;
    if (strict) doc["strict"] = true;
    const PipelineConfig cfg = parse_config(doc, base);

    json result;
    if (command == "synth") result = cmd_synth(cfg);
    else if (command == "preprocess") result = cmd_preprocess(cfg);
    else if (command == "extract") result = cmd_extract(cfg);
    else if (command == "evaluate") result = cmd_evaluate(cfg);
    else if (command == "search") result = cmd_search(cfg);
    else if (command == "predict") result = cmd_predict(cfg);
    else result = cmd_report(cfg);
    out << json{{"command", command}, {"status", "ok"}, {"result", result}}.dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    return fail(err, e.kind(), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(err, ErrorKind::data, e.what());
  } catch (const json::exception& e) {
    return fail(err, ErrorKind::data, e.what());
  } catch (const std::exception& e) {
    return fail(err, ErrorKind::numeric, e.what());
  }
}

}  // namespace pcg::cli
