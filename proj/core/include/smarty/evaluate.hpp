#pragma once

#include <span>
#include <vector>

#include "smarty/ann.hpp"
#include "smarty/ga.hpp"
#include "smarty/metrics.hpp"
#include "smarty/pet_sim.hpp"
#include "smarty/quantize.hpp"

namespace smarty {

enum class TaskKind { regression, classification };

/// Sorted unique frame labels; the class list of a classification dataset
/// (the non-valid -120 sorts first, matching the reported matrices).
std::vector<double> dataset_classes(const Dataset& dataset);

/// Predicted class index = argmax over output neurons.
int argmax_class(std::span<const double> outputs);

/// Evaluation of a coefficient set over a frame subset.
///   regression:     per-frame scalar predictions, MAE against labels.
///   classification: argmax predictions, confusion matrix and Eq.-style
///                   macro accuracy/precision over `classes`.
struct EvalReport {
  TaskKind task = TaskKind::regression;
  std::vector<double> predictions;  // scalar value or class display label
  double mae = 0.0;                 // regression only
  ConfusionMatrix matrix;           // classification only
  double accuracy = 0.0;
  double precision = 0.0;
};

/// Golden (double-precision) model evaluation.
EvalReport evaluate_golden(const TopologySpec& topo,
                           const CoefficientSet& coeffs,
                           const Dataset& dataset,
                           std::span<const int> indices, TaskKind task,
                           const std::vector<double>& classes = {},
                           ActivationKind act = ActivationKind::identity);

/// Quantizes with `method`, then runs the bit-exact fixed-point model over
/// the frames.
EvalReport evaluate_quantized(const TopologySpec& topo,
                              const CoefficientSet& coeffs_real,
                              const Dataset& dataset,
                              std::span<const int> indices, QuantMethod method,
                              TaskKind task,
                              const std::vector<double>& classes = {},
                              ActivationKind act = ActivationKind::identity);

}  // namespace smarty
