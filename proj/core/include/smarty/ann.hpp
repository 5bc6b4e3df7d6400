#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "smarty/fixedpoint.hpp"
#include "smarty/topology.hpp"

namespace smarty {

struct ShapeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The datapath neurons are affine; relu is an opt-in for training
/// experiments and is applied to every layer except the output layer.
enum class ActivationKind { identity, relu };

/// Ordered weights-and-biases vector, neuron-major with the bias first,
/// matching build_fully_connected's coefficient indices.
using CoefficientSet = std::vector<double>;
using FixedCoefficientSet = std::vector<FxValue>;

/// A TDC code enters the datapath as a Q(32,8) value equal to the code.
inline FxValue fx_from_code(std::int64_t code) {
  return FxValue{code << 8, FxFormat::accumulator()};
}

std::vector<FxValue> to_fixed_inputs(std::span<const double> inputs);

/// Double-precision reference evaluation, layer by layer in neuron order.
std::vector<double> infer_golden(const TopologySpec& spec,
                                 const CoefficientSet& coeffs,
                                 std::span<const double> inputs,
                                 ActivationKind act = ActivationKind::identity);

/// Bit-exact fixed-point evaluation: same traversal as infer_golden with
/// every multiply-accumulate going through fx_mac. Coefficients are Q(10,8),
/// inputs and activations Q(32,8).
std::vector<FxValue> infer_fixed(const TopologySpec& spec,
                                 const FixedCoefficientSet& coeffs,
                                 std::span<const FxValue> inputs,
                                 ActivationKind act = ActivationKind::identity);

/// Golden-vs-fixed comparison over a batch of frames. Coefficients are
/// clipped-quantized to Q(10,8) once and the *same* (dequantized) values feed
/// both paths, so the report isolates datapath rounding rather than
/// coefficient rounding. Relative errors are aggregated per output neuron
/// and overall.
struct ModelErrorReport {
  std::vector<double> max_rel;   // per output neuron
  std::vector<double> mean_rel;  // per output neuron
  double overall_max = 0.0;
  double overall_mean = 0.0;
  std::int64_t frames = 0;
};

ModelErrorReport compare_models(const TopologySpec& spec,
                                const CoefficientSet& coeffs,
                                const std::vector<std::vector<double>>& input_batch,
                                ActivationKind act = ActivationKind::identity);

/// Operation count under the documented convention: one multiply plus one
/// add per weight and one add per bias, summed over non-input neurons.
/// Input-layer coefficient ops use the same convention and are reported
/// separately, since whether the chip counted them is not established.
struct OperationCount {
  std::int64_t non_input_ops = 0;
  std::int64_t input_layer_ops = 0;
  std::int64_t total() const { return non_input_ops + input_layer_ops; }
};

OperationCount count_operations(const TopologySpec& spec);

}  // namespace smarty
