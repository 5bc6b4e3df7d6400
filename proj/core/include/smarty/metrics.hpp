#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace smarty {

struct UnknownClass : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Square count matrix, rows = actual class, columns = predicted class.
/// Classes are the ordered display labels (the non-valid class -120 first
/// for the coincidence task).
struct ConfusionMatrix {
  std::vector<double> classes;
  std::vector<std::vector<std::int64_t>> counts;

  std::int64_t total() const {
    std::int64_t t = 0;
    for (const auto& row : counts)
      for (auto c : row) t += c;
    return t;
  }
};

/// Builds the matrix from per-frame (actual, predicted) class labels given
/// as display values. Throws UnknownClass for a label outside `classes`.
ConfusionMatrix confusion(std::span<const double> predictions,
                          std::span<const double> labels,
                          const std::vector<double>& classes);

/// Same, with class indices instead of display values.
ConfusionMatrix confusion_indexed(std::span<const int> predictions,
                                  std::span<const int> labels,
                                  const std::vector<double>& classes);

/// One-vs-rest accuracy and precision per class, aggregated as the
/// unweighted mean over classes. A class nobody predicted contributes
/// precision 0.
struct MacroMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  std::vector<double> per_class_accuracy;
  std::vector<double> per_class_precision;
};

MacroMetrics accuracy_precision(const ConfusionMatrix& matrix);

}  // namespace smarty
