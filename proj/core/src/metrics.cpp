#include "smarty/metrics.hpp"

#include <algorithm>
#include <string>

namespace smarty {

namespace {

int class_index(double value, const std::vector<double>& classes) {
  const auto it = std::find(classes.begin(), classes.end(), value);
  if (it == classes.end()) {
    throw UnknownClass("label " + std::to_string(value) +
                       " is not in the class list");
  }
  return static_cast<int>(it - classes.begin());
}

ConfusionMatrix zero_matrix(const std::vector<double>& classes) {
  ConfusionMatrix m;
  m.classes = classes;
  m.counts.assign(classes.size(),
                  std::vector<std::int64_t>(classes.size(), 0));
  return m;
}

}  // namespace

ConfusionMatrix confusion(std::span<const double> predictions,
                          std::span<const double> labels,
                          const std::vector<double>& classes) {
  if (predictions.size() != labels.size()) {
    throw UnknownClass("predictions and labels differ in length");
  }
  ConfusionMatrix m = zero_matrix(classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++m.counts[class_index(labels[i], classes)]
               [class_index(predictions[i], classes)];
  }
  return m;
}

ConfusionMatrix confusion_indexed(std::span<const int> predictions,
                                  std::span<const int> labels,
                                  const std::vector<double>& classes) {
  if (predictions.size() != labels.size()) {
    throw UnknownClass("predictions and labels differ in length");
  }
  ConfusionMatrix m = zero_matrix(classes);
  const int k = static_cast<int>(classes.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k || predictions[i] < 0 ||
        predictions[i] >= k) {
      throw UnknownClass("class index out of range");
    }
    ++m.counts[labels[i]][predictions[i]];
  }
  return m;
}

MacroMetrics accuracy_precision(const ConfusionMatrix& matrix) {
  const auto k = matrix.classes.size();
  const std::int64_t total = matrix.total();
  if (k == 0 || total == 0) throw EmptyMatrix("confusion matrix has no counts");

  MacroMetrics out;
  for (std::size_t c = 0; c < k; ++c) {
    std::int64_t tp = matrix.counts[c][c];
    std::int64_t row = 0, col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += matrix.counts[c][j];
      col += matrix.counts[j][c];
    }
    const std::int64_t fp = col - tp;
    const std::int64_t fn = row - tp;
    const std::int64_t tn = total - tp - fp - fn;
    const double acc =
        static_cast<double>(tp + tn) / static_cast<double>(total);
    const double prec =
        (tp + fp) == 0
            ? 0.0
            : static_cast<double>(tp) / static_cast<double>(tp + fp);
    out.per_class_accuracy.push_back(acc);
    out.per_class_precision.push_back(prec);
    out.accuracy += acc;
    out.precision += prec;
  }
  out.accuracy /= static_cast<double>(k);
  out.precision /= static_cast<double>(k);
  return out;
}

}  // namespace smarty
