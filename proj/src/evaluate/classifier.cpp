#include <algorithm>

#include "pcg/error.hpp"
#include "pcg/evaluate.hpp"

namespace pcg {

TrainedModel train_classifier(const ClassifierSpec& spec, const Matrix& x, std::span<const Label> y,
                              ProbabilityMode probability) {
  TrainedModel out;
  if (const auto* kernel = std::get_if<KernelSpec>(&spec)) {
    auto model = svm_train(x, y, *kernel);
    if (probability == ProbabilityMode::platt) {
      std::vector<double> dec(x.rows());
      for (std::size_t i = 0; i < x.rows(); ++i) dec[i] = svm_decision(model, x.row(i));
      out.probability = fit_platt(dec, y);
    }
    out.model = std::move(model);
  } else {
    const auto& knn = std::get<KnnSpec>(spec);
    if (knn.k <= 0) throw ConfigError("k-NN needs k >= 1");
    if (static_cast<std::size_t>(knn.k) > x.rows()) throw ConfigError("k-NN k exceeds the training set size");
    out.model = KnnReference{x, std::vector<Label>(y.begin(), y.end()), knn};
  }
  return out;
}

double cad_probability(const TrainedModel& model, std::span<const double> x) {
  if (const auto* svm = std::get_if<SvmModel>(&model.model)) {
    return decision_to_probability(svm_decision(*svm, x), model.probability);
  }
  const auto& ref = std::get<KnnReference>(model.model);
  return knn_cad_fraction(ref.x, ref.y, x, ref.spec.k, ref.spec.metric);
}

Label predict_label(const TrainedModel& model, std::span<const double> x) {
  if (const auto* svm = std::get_if<SvmModel>(&model.model)) return svm_predict(*svm, x);
  return cad_probability(model, x) >= 0.5 ? Label::cad : Label::normal;
}

void validate(const CvConfig& cfg) {
  if (cfg.k < 2) throw ConfigError("cross-validation needs k >= 2");
  if (cfg.iterations < 1) throw ConfigError("cross-validation needs at least one iteration");
  if (const auto* kernel = std::get_if<KernelSpec>(&cfg.classifier)) {
    if (!(kernel->c > 0.0)) throw ConfigError("SVM C must be positive");
    if (kernel->gamma && kernel->kind != KernelKind::linear && !(*kernel->gamma > 0.0)) {
      throw ConfigError("kernel gamma must be positive");
    }
  } else if (std::get<KnnSpec>(cfg.classifier).k <= 0) {
    throw ConfigError("k-NN needs k >= 1");
  }
}

}  // namespace pcg
