#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace smarty {

// Chip resource budgets.
inline constexpr int kMaxNeurons = 128;
inline constexpr int kMaxCoefficients = 1024;
inline constexpr int kTopologyBits = 624;   // topology file memory
inline constexpr int kNeuronBits = 4096;    // neuron descriptor memory
inline constexpr int kMaxLayers = 77;       // (624 - 8) / 8 layer-size slots

struct EmptyLayer : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ImageOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MalformedImage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-neuron wiring: how many weights feed it and where its coefficient
/// block starts. Each neuron owns (1 + fan_in) consecutive coefficients,
/// bias first. Input-layer neurons have fan_in = 1 applied to the raw
/// external input (O = w0 + w1 * x), which the coefficient ordering must
/// preserve.
struct NeuronDescriptor {
  int fan_in = 0;
  int first_coeff_index = 0;
  bool operator==(const NeuronDescriptor&) const = default;
};

struct TopologySpec {
  std::vector<int> layer_sizes;
  std::vector<NeuronDescriptor> neurons;  // layer-major, neuron order

  int total_neurons() const { return static_cast<int>(neurons.size()); }
  int coefficient_count() const {
    if (neurons.empty()) return 0;
    const auto& last = neurons.back();
    return last.first_coeff_index + 1 + last.fan_in;
  }
  int input_size() const { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
  int output_size() const { return layer_sizes.empty() ? 0 : layer_sizes.back(); }

  bool operator==(const TopologySpec&) const = default;
};

/// Bit image of a topology: 624-bit topology block (8-bit layer count
/// followed by 8-bit layer sizes) and 4096-bit neuron block (128 slots of
/// 32 bits: bits 0-11 first_coeff_index, bits 12-19 fan_in, rest zero).
/// Stored little-endian, matching the exported binary file layout.
struct TopologyImage {
  std::array<std::uint8_t, kTopologyBits / 8> topo_bytes{};
  std::array<std::uint8_t, kNeuronBits / 8> neuron_bytes{};
  bool operator==(const TopologyImage&) const = default;
};

struct BudgetViolation {
  enum class Kind { neuron_budget, coefficient_budget, image_overflow };
  Kind kind;
  std::string detail;
};

/// Fully-connected wiring for the given layer sizes. Input-layer neurons get
/// (bias, weight) pairs on the raw input; every later neuron fans in from
/// the whole previous layer. Coefficient indices are the exclusive prefix
/// sums of (1 + fan_in) in neuron order. Throws EmptyLayer on a zero size.
/// Single-layer lists are accepted so that budget checks can be exercised
/// on degenerate specs.
TopologySpec build_fully_connected(const std::vector<int>& layer_sizes);

/// Chip budget check. Returns every violated budget; empty means ok.
/// Violations are data, not faults: nothing throws.
std::vector<BudgetViolation> validate(const TopologySpec& spec);

/// Deterministic bit-image encoding. Throws ImageOverflow when the layout
/// cannot fit the 624/4096-bit memories (too many layers or neurons, or a
/// field exceeding its slot width) regardless of the other chip budgets.
TopologyImage encode(const TopologySpec& spec);

/// Exact inverse of encode. Throws MalformedImage on a zero or oversized
/// layer count, a zero layer size, or descriptors inconsistent with the
/// fully-connected wiring implied by the layer list.
TopologySpec decode(const TopologyImage& image);

}  // namespace smarty
