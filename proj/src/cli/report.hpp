#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcg/evaluate.hpp"

namespace pcg::cli {

nlohmann::json metrics_json(const Metrics& m);
nlohmann::json summary_json(const MetricSummary& s);
nlohmann::json confusion_json(const Confusion& c);
nlohmann::json evaluation_json(const EvaluationReport& r);
nlohmann::json combinations_json(const CombinationTable& t);
nlohmann::json predictions_json(const std::vector<SubjectPrediction>& p);

/// Envelope shared by every report file.
nlohmann::json report_envelope(const std::string& command, const nlohmann::json& resolved_config);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
void write_text(const std::filesystem::path& path, const std::string& text);

// SVG plots

struct Series {
  std::string name;
  std::string color;
  std::vector<double> x, mean, std;
};

std::string svg_band_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<Series>& series);

/// rows x cols heat map, rows drawn top to bottom.
std::string svg_heatmap(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                        const std::vector<std::vector<double>>& values);

struct BoxGroup {
  std::string label;
  std::vector<double> a;  // first class
  std::vector<double> b;  // second class
  double p_value = 1.0;
};

/// Paired box plots per group with significance stars
/// (* p<0.05, ** p<0.01, *** p<0.001).
std::string svg_boxplot(const std::string& title, const std::string& ylabel, const std::string& a_name,
                        const std::string& b_name, const std::vector<BoxGroup>& groups);

std::string significance_stars(double p);

}  // namespace pcg::cli
