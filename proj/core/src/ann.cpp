#include "smarty/ann.hpp"

#include <algorithm>
#include <string>

#include "smarty/quantize.hpp"

namespace smarty {

namespace {

void check_shapes(const TopologySpec& spec, std::size_t n_coeffs,
                  std::size_t n_inputs) {
  if (spec.layer_sizes.empty()) throw ShapeMismatch("topology has no layers");
  if (static_cast<int>(n_inputs) != spec.input_size()) {
    throw ShapeMismatch("got " + std::to_string(n_inputs) + " inputs, expected " +
                        std::to_string(spec.input_size()));
  }
  if (static_cast<int>(n_coeffs) != spec.coefficient_count()) {
    throw ShapeMismatch("got " + std::to_string(n_coeffs) +
                        " coefficients, expected " +
                        std::to_string(spec.coefficient_count()));
  }
}

}  // namespace

std::vector<FxValue> to_fixed_inputs(std::span<const double> inputs) {
  std::vector<FxValue> out;
  out.reserve(inputs.size());
  for (double x : inputs) {
    out.push_back(to_fixed(x, FxFormat::accumulator(), Overflow::saturate));
  }
  return out;
}

std::vector<double> infer_golden(const TopologySpec& spec,
                                 const CoefficientSet& coeffs,
                                 std::span<const double> inputs,
                                 ActivationKind act) {
  check_shapes(spec, coeffs.size(), inputs.size());
  const std::size_t n_layers = spec.layer_sizes.size();
  std::vector<double> prev(inputs.begin(), inputs.end());
  std::vector<double> cur;
  int neuron = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int size = spec.layer_sizes[l];
    const bool output_layer = (l + 1 == n_layers);
    cur.resize(size);
    for (int n = 0; n < size; ++n, ++neuron) {
      const auto& d = spec.neurons[neuron];
      const double* w = coeffs.data() + d.first_coeff_index;
      double acc = w[0];
      if (l == 0) {
        acc += w[1] * prev[n];  // input neuron: bias + weight on the raw input
      } else {
        for (int j = 0; j < d.fan_in; ++j) acc += w[1 + j] * prev[j];
      }
      if (!output_layer && act == ActivationKind::relu && acc < 0.0) acc = 0.0;
      cur[n] = acc;
    }
    prev.swap(cur);
  }
  return prev;
}

std::vector<FxValue> infer_fixed(const TopologySpec& spec,
                                 const FixedCoefficientSet& coeffs,
                                 std::span<const FxValue> inputs,
                                 ActivationKind act) {
  check_shapes(spec, coeffs.size(), inputs.size());
  const FxFormat acc_fmt = FxFormat::accumulator();
  for (const auto& in : inputs) {
    if (!(in.format == acc_fmt)) {
      throw ShapeMismatch("fixed inputs must use the accumulator format");
    }
  }
  const std::size_t n_layers = spec.layer_sizes.size();
  std::vector<FxValue> prev(inputs.begin(), inputs.end());
  std::vector<FxValue> cur;
  int neuron = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int size = spec.layer_sizes[l];
    const bool output_layer = (l + 1 == n_layers);
    cur.resize(size);
    for (int n = 0; n < size; ++n, ++neuron) {
      const auto& d = spec.neurons[neuron];
      const FxValue* w = coeffs.data() + d.first_coeff_index;
      // Bias has 8 frac bits already; its raw value carries into Q(32,8).
      FxValue acc{w[0].raw, acc_fmt};
      if (l == 0) {
        acc = fx_mac(acc, w[1], prev[n]);
      } else {
        for (int j = 0; j < d.fan_in; ++j) acc = fx_mac(acc, w[1 + j], prev[j]);
      }
      if (!output_layer && act == ActivationKind::relu && acc.raw < 0) acc.raw = 0;
      cur[n] = acc;
    }
    prev.swap(cur);
  }
  return prev;
}

ModelErrorReport compare_models(const TopologySpec& spec,
                                const CoefficientSet& coeffs,
                                const std::vector<std::vector<double>>& input_batch,
                                ActivationKind act) {
  if (input_batch.empty()) throw ShapeMismatch("empty input batch");
  const FixedCoefficientSet qcoeffs = quantize_set(coeffs, QuantMethod::clipped);
  CoefficientSet golden_coeffs(qcoeffs.size());
  for (std::size_t i = 0; i < qcoeffs.size(); ++i) {
    golden_coeffs[i] = qcoeffs[i].value();
  }

  ModelErrorReport report;
  const int n_out = spec.output_size();
  report.max_rel.assign(n_out, 0.0);
  report.mean_rel.assign(n_out, 0.0);
  double total = 0.0;
  for (const auto& frame : input_batch) {
    const auto golden = infer_golden(spec, golden_coeffs, frame, act);
    const auto fixed = infer_fixed(spec, qcoeffs, to_fixed_inputs(frame), act);
    for (int j = 0; j < n_out; ++j) {
      const double err = relative_error(golden[j], fixed[j].value());
      report.max_rel[j] = std::max(report.max_rel[j], err);
      report.mean_rel[j] += err;
      total += err;
    }
    ++report.frames;
  }
  for (int j = 0; j < n_out; ++j) report.mean_rel[j] /= static_cast<double>(report.frames);
  report.overall_max = *std::max_element(report.max_rel.begin(), report.max_rel.end());
  report.overall_mean = total / static_cast<double>(report.frames * n_out);
  return report;
}

OperationCount count_operations(const TopologySpec& spec) {
  OperationCount out;
  const int n_in = spec.input_size();
  for (int n = 0; n < spec.total_neurons(); ++n) {
    const std::int64_t ops = 2 * spec.neurons[n].fan_in + 1;
    if (n < n_in) {
      out.input_layer_ops += ops;
    } else {
      out.non_input_ops += ops;
    }
  }
  return out;
}

}  // namespace smarty
