#include "pcg/learn.hpp"

namespace pcg {

void Confusion::add(Label truth, Label predicted) {
  if (truth == Label::cad) {
    (predicted == Label::cad ? tp : fn) += 1;
  } else {
    (predicted == Label::cad ? fp : tn) += 1;
  }
}

Confusion& Confusion::operator+=(const Confusion& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

Metrics compute_metrics(const Confusion& c) {
  Metrics m;
  m.confusion = c;
  auto ratio = [](std::size_t num, std::size_t den, bool& defined) {
    defined = den > 0;
    return defined ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
  };
  m.sens = ratio(c.tp, c.tp + c.fn, m.sens_defined);
  m.spec = ratio(c.tn, c.tn + c.fp, m.spec_defined);
  m.precision = ratio(c.tp, c.tp + c.fp, m.precision_defined);
  bool total_defined = false;
  m.acc = ratio(c.tp + c.tn, c.total(), total_defined);
  m.f1_defined = m.precision_defined && m.sens_defined && (m.precision + m.sens) > 0.0;
  m.f1 = m.f1_defined ? 2.0 * m.precision * m.sens / (m.precision + m.sens) : 0.0;
  return m;
}

}  // namespace pcg
