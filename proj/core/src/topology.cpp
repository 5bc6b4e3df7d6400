#include "smarty/topology.hpp"

#include <cstring>
#include <numeric>

namespace smarty {

TopologySpec build_fully_connected(const std::vector<int>& layer_sizes) {
  if (layer_sizes.empty()) throw EmptyLayer("layer list is empty");
  TopologySpec spec;
  spec.layer_sizes = layer_sizes;
  int next_coeff = 0;
  for (std::size_t l = 0; l < layer_sizes.size(); ++l) {
    const int size = layer_sizes[l];
    if (size <= 0) throw EmptyLayer("layer " + std::to_string(l) + " has size 0");
    const int fan_in = (l == 0) ? 1 : layer_sizes[l - 1];
    for (int n = 0; n < size; ++n) {
      spec.neurons.push_back({fan_in, next_coeff});
      next_coeff += 1 + fan_in;
    }
  }
  return spec;
}

std::vector<BudgetViolation> validate(const TopologySpec& spec) {
  std::vector<BudgetViolation> out;
  const int neurons = spec.total_neurons();
  const int coeffs = spec.coefficient_count();
  if (neurons > kMaxNeurons) {
    out.push_back({BudgetViolation::Kind::neuron_budget,
                   std::to_string(neurons) + " neurons > " +
                       std::to_string(kMaxNeurons)});
  }
  if (coeffs > kMaxCoefficients) {
    out.push_back({BudgetViolation::Kind::coefficient_budget,
                   std::to_string(coeffs) + " coefficients > " +
                       std::to_string(kMaxCoefficients)});
  }
  if (spec.layer_sizes.empty() ||
      static_cast<int>(spec.layer_sizes.size()) > kMaxLayers) {
    out.push_back({BudgetViolation::Kind::image_overflow,
                   std::to_string(spec.layer_sizes.size()) +
                       " layers do not fit the 624-bit topology image"});
  }
  return out;
}

TopologyImage encode(const TopologySpec& spec) {
  const auto layers = static_cast<int>(spec.layer_sizes.size());
  if (layers == 0 || layers > kMaxLayers) {
    throw ImageOverflow("layer count " + std::to_string(layers) +
                        " does not fit the topology image");
  }
  if (spec.total_neurons() > kMaxNeurons) {
    throw ImageOverflow("neuron count " + std::to_string(spec.total_neurons()) +
                        " does not fit the neuron image");
  }
  TopologyImage img;
  img.topo_bytes[0] = static_cast<std::uint8_t>(layers);
  for (int l = 0; l < layers; ++l) {
    const int size = spec.layer_sizes[l];
    if (size <= 0 || size > 255) {
      throw ImageOverflow("layer size " + std::to_string(size) +
                          " does not fit an 8-bit slot");
    }
    img.topo_bytes[1 + l] = static_cast<std::uint8_t>(size);
  }
  for (int n = 0; n < spec.total_neurons(); ++n) {
    const auto& d = spec.neurons[n];
    if (d.first_coeff_index < 0 || d.first_coeff_index > 0xfff ||
        d.fan_in < 0 || d.fan_in > 0xff) {
      throw ImageOverflow("neuron descriptor field out of slot range");
    }
    const std::uint32_t word = static_cast<std::uint32_t>(d.first_coeff_index) |
                               (static_cast<std::uint32_t>(d.fan_in) << 12);
    for (int b = 0; b < 4; ++b) {
      img.neuron_bytes[4 * n + b] = static_cast<std::uint8_t>(word >> (8 * b));
    }
  }
  return img;
}

TopologySpec decode(const TopologyImage& image) {
  const int layers = image.topo_bytes[0];
  if (layers == 0 || layers > kMaxLayers) {
    throw MalformedImage("invalid layer count " + std::to_string(layers));
  }
  std::vector<int> sizes(layers);
  for (int l = 0; l < layers; ++l) {
    sizes[l] = image.topo_bytes[1 + l];
    if (sizes[l] == 0) {
      throw MalformedImage("layer " + std::to_string(l) + " has size 0");
    }
  }
  TopologySpec spec = build_fully_connected(sizes);
  if (spec.total_neurons() > kMaxNeurons) {
    throw MalformedImage("decoded neuron count exceeds the neuron image");
  }
  for (int n = 0; n < spec.total_neurons(); ++n) {
    std::uint32_t word = 0;
    for (int b = 0; b < 4; ++b) {
      word |= static_cast<std::uint32_t>(image.neuron_bytes[4 * n + b]) << (8 * b);
    }
    const NeuronDescriptor got{static_cast<int>((word >> 12) & 0xff),
                               static_cast<int>(word & 0xfff)};
    if (!(got == spec.neurons[n])) {
      throw MalformedImage("neuron descriptor " + std::to_string(n) +
                           " inconsistent with the layer list");
    }
  }
  return spec;
}

}  // namespace smarty
