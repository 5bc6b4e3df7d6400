#include "smarty/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace smarty {

std::vector<double> dataset_classes(const Dataset& dataset) {
  std::vector<double> classes;
  for (const auto& f : dataset.frames) classes.push_back(f.label);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

int argmax_class(std::span<const double> outputs) {
  return static_cast<int>(std::max_element(outputs.begin(), outputs.end()) -
                          outputs.begin());
}

namespace {

EvalReport evaluate(const TopologySpec& topo, const Dataset& dataset,
                    std::span<const int> indices, TaskKind task,
                    const std::vector<double>& classes,
                    const std::function<std::vector<double>(
                        std::span<const double>)>& run) {
  EvalReport report;
  report.task = task;
  const int n_in = topo.input_size();
  std::vector<double> labels;
  for (int idx : indices) {
    const Frame& f = dataset.frames[static_cast<std::size_t>(idx)];
    const auto outputs = run(f.input_codes(n_in));
    if (task == TaskKind::regression) {
      report.predictions.push_back(outputs[0]);
      report.mae += std::abs(outputs[0] - f.label);
    } else {
      report.predictions.push_back(classes[argmax_class(outputs)]);
    }
    labels.push_back(f.label);
  }
  if (task == TaskKind::regression) {
    if (!indices.empty()) report.mae /= static_cast<double>(indices.size());
  } else {
    report.matrix = confusion(report.predictions, labels, classes);
    const MacroMetrics mm = accuracy_precision(report.matrix);
    report.accuracy = mm.accuracy;
    report.precision = mm.precision;
  }
  return report;
}

}  // namespace

EvalReport evaluate_golden(const TopologySpec& topo,
                           const CoefficientSet& coeffs,
                           const Dataset& dataset,
                           std::span<const int> indices, TaskKind task,
                           const std::vector<double>& classes,
                           ActivationKind act) {
  return evaluate(topo, dataset, indices, task, classes,
                  [&](std::span<const double> in) {
                    return infer_golden(topo, coeffs, in, act);
                  });
}

EvalReport evaluate_quantized(const TopologySpec& topo,
                              const CoefficientSet& coeffs_real,
                              const Dataset& dataset,
                              std::span<const int> indices, QuantMethod method,
                              TaskKind task, const std::vector<double>& classes,
                              ActivationKind act) {
  const FixedCoefficientSet qcoeffs = quantize_set(coeffs_real, method);
  return evaluate(topo, dataset, indices, task, classes,
                  [&](std::span<const double> in) {
                    const auto fixed =
                        infer_fixed(topo, qcoeffs, to_fixed_inputs(in), act);
                    std::vector<double> out;
                    out.reserve(fixed.size());
                    for (const auto& v : fixed) out.push_back(v.value());
                    return out;
                  });
}

}  // namespace smarty
