#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "smarty/ann.hpp"
#include "smarty/metrics.hpp"
#include "smarty/pet_sim.hpp"
#include "smarty/topology.hpp"

namespace smarty {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Topology text format: JSON object {"layers":[...]}.
TopologySpec read_topology_json(const std::filesystem::path& path);
void write_topology_json(const std::filesystem::path& path,
                         const TopologySpec& spec);

// Topology binary image: 78-byte topology block followed by the 512-byte
// neuron block, little-endian.
TopologyImage read_topology_image(const std::filesystem::path& path);
void write_topology_image(const std::filesystem::path& path,
                          const TopologyImage& image);

// Golden coefficients: JSON array of reals.
CoefficientSet read_coefficients_json(const std::filesystem::path& path);
void write_coefficients_json(const std::filesystem::path& path,
                             const CoefficientSet& coeffs);

// Fixed-point coefficient image: 1024 little-endian 16-bit slots, each
// holding a sign-extended 10-bit raw value; unused slots zero (2048 bytes).
FixedCoefficientSet read_coefficient_image(const std::filesystem::path& path,
                                           std::size_t count);
void write_coefficient_image(const std::filesystem::path& path,
                             const FixedCoefficientSet& coeffs);

// Dataset: JSON Lines, one frame per line:
// {"codes":[10 ints],"fired":[10 bools],"label":..,"source_x_mm":..,"valid":..}
Dataset read_dataset_jsonl(const std::filesystem::path& path,
                           std::uint64_t split_seed);
void write_dataset_jsonl(const std::filesystem::path& path, const Dataset& ds);

// Training history: JSON array of {generation, best_loss, mean_loss}.
struct HistoryEntry {
  int generation;
  double best_loss;
  double mean_loss;
};
void write_history_json(const std::filesystem::path& path,
                        const std::vector<HistoryEntry>& history);

// Confusion matrix CSV: header row "class,<labels...>" (predicted columns),
// then one row per actual class.
void write_confusion_csv(const std::filesystem::path& path,
                         const ConfusionMatrix& matrix);
ConfusionMatrix read_confusion_csv(const std::filesystem::path& path);

/// Run manifest emitted next to every CLI output. config_hash is FNV-1a over
/// the canonical flag string, so identical manifests imply identical outputs.
struct RunManifest {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string tool_version;
  double wall_time_s = 0.0;
};
void write_manifest(const std::filesystem::path& path, const RunManifest& m);

std::uint64_t fnv1a64(const std::string& text);

/// Shortest decimal string that round-trips the double.
std::string format_double(double v);

}  // namespace smarty
