#include <fstream>

#include "pcg/cli.hpp"
#include "pcg/error.hpp"
#include "report.hpp"

namespace pcg::cli {

using nlohmann::json;

json confusion_json(const Confusion& c) { return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}}; }

json metrics_json(const Metrics& m) {
  return {{"sens", m.sens},
          {"spec", m.spec},
          {"acc", m.acc},
          {"f1", m.f1},
          {"precision", m.precision},
          {"confusion", confusion_json(m.confusion)}};
}

json summary_json(const MetricSummary& s) {
  return {{"sens", s.sens}, {"spec", s.spec}, {"acc", s.acc}, {"f1", s.f1}, {"sens_spec_mean", 0.5 * (s.sens + s.spec)}};
}

json evaluation_json(const EvaluationReport& r) {
  json models = json::array();
  for (const auto& t : r.models) {
    json m = {{"iteration", t.iteration},
              {"fold", t.fold},
              {"dim", t.dim},
              {"train_subjects", t.train_subjects},
              {"test_subjects", t.test_subjects},
              {"epoch", metrics_json(t.epoch)},
              {"subject", metrics_json(t.subject)}};
    if (t.tuned_c) m["tuned_c"] = *t.tuned_c;
    if (t.tuned_gamma) m["tuned_gamma"] = *t.tuned_gamma;
    models.push_back(std::move(m));
  }
  return {{"epoch", summary_json(r.epoch_metrics)},
          {"subject", summary_json(r.subject_metrics)},
          {"epoch_pooled", confusion_json(r.epoch_pooled)},
          {"subject_pooled", confusion_json(r.subject_pooled)},
          {"fd_median", r.fd_median},
          {"n_features", r.n_features},
          {"n_models", r.models.size()},
          {"leakage_violations", r.leakage_violations},
          {"models", models}};
}

json combinations_json(const CombinationTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"channels", r.channels},
                    {"epoch", summary_json(r.epoch)},
                    {"subject", summary_json(r.subject)},
                    {"fd_median", r.fd_median}});
  }
  json best = json::object();
  for (const auto& [size, idx] : t.best_by_size) best[std::to_string(size)] = t.rows[idx].channels;
  return {{"rows", rows}, {"best_by_size", best}};
}

json predictions_json(const std::vector<SubjectPrediction>& p) {
  json out = json::array();
  for (const auto& s : p) {
    std::vector<std::string> epochs;
    for (Label l : s.epoch_labels) epochs.emplace_back(to_string(l));
    out.push_back({{"subject_id", s.subject_id},
                   {"label", to_string(s.label)},
                   {"truth", to_string(s.truth)},
                   {"epoch_labels", epochs},
                   {"epoch_probabilities", s.epoch_probabilities},
                   {"mean_probability", s.mean_probability}});
  }
  return out;
}

json report_envelope(const std::string& command, const json& resolved_config) {
  return {{"schema_version", kSchemaVersion},
          {"tool_version", kToolVersion},
          {"command", command},
          {"config", resolved_config}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

}  // namespace pcg::cli
