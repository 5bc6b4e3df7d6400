#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "smarty/ann.hpp"
#include "smarty/pet_sim.hpp"
#include "smarty/topology.hpp"

namespace smarty {

struct EmptyDataset : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonDifferentiable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Training losses. absolute_error and squared_error are scalar-output;
/// euclidean_2d is the planar distance between predicted and true source
/// position; cross_entropy trains the classification deployment (the chip
/// itself has no softmax: inference takes the argmax over output neurons).
enum class LossKind { absolute_error, squared_error, euclidean_2d, cross_entropy };

/// For cross_entropy the target is a single element holding the class index.
double loss(LossKind kind, std::span<const double> prediction,
            std::span<const double> target);

/// Adam refinement settings: full-batch gradient epochs with the learning
/// rate decreasing linearly from lr_start to lr_end across epochs.
struct AdamConfig {
  int epochs = 0;
  double lr_start = 0.01;
  double lr_end = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

enum class CrossoverKind { uniform, single_point };

struct GaConfig {
  int population_size = 20;
  int generations = 30;
  CrossoverKind crossover = CrossoverKind::uniform;
  double gene_swap_prob = 0.5;   // per-gene chance to take parent B's gene
  double mutation_rate = 0.01;   // per-gene resample probability
  int elitism_count = 2;
  std::optional<AdamConfig> refine;
  std::uint64_t seed = 0;
  double init_low = -1.0;        // gene init / mutation resample distribution
  double init_high = 1.0;
};

/// One candidate network: a real-valued coefficient set plus its fitness
/// (average loss over the training frames, lower is better).
struct Individual {
  CoefficientSet coeffs;
  double fitness = 0.0;
};

struct GenerationStats {
  int generation = 0;
  double best_loss = 0.0;
  double mean_loss = 0.0;
};

/// Frame batch in network currency: one input vector and one target vector
/// per frame (scalar losses: {label}; euclidean_2d: {x, 0}; cross_entropy:
/// {class index}).
struct TrainingSet {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> targets;
  std::size_t size() const { return inputs.size(); }
};

TrainingSet make_training_set(const Dataset& dataset,
                              std::span<const int> indices,
                              const TopologySpec& topo, LossKind kind,
                              const std::vector<double>& classes = {});

/// Average loss of a coefficient set over a frame batch. Frames accumulate
/// in order with one accumulator, so the value is independent of any outer
/// parallelism.
double average_loss(const TopologySpec& topo, std::span<const double> coeffs,
                    const TrainingSet& data, LossKind kind,
                    ActivationKind act = ActivationKind::identity);

/// Average loss plus its analytic gradient (reverse traversal of the
/// network graph), written to grad (resized and zeroed internally).
double loss_and_gradient(const TopologySpec& topo,
                         std::span<const double> coeffs,
                         const TrainingSet& data, LossKind kind,
                         ActivationKind act, std::vector<double>& grad);

/// Gene mixing between two parents. Uniform crossover takes parent B's gene
/// with probability gene_swap_prob (0 clones A, 1 clones B); single-point
/// splices A's prefix onto B's suffix.
CoefficientSet crossover_genes(const CoefficientSet& a, const CoefficientSet& b,
                               const GaConfig& config, Rng& rng);

/// Per-gene mutation: with probability mutation_rate the gene is resampled
/// from the init distribution [init_low, init_high].
void mutate_genes(CoefficientSet& genes, const GaConfig& config, Rng& rng);

/// Full-batch Adam with linear learning-rate decay. Returns the refined
/// individual (fitness field is left to the caller to re-evaluate); zero
/// epochs is the identity.
Individual adam_refine(Individual individual, const TopologySpec& topo,
                       const TrainingSet& train, LossKind kind,
                       const AdamConfig& config,
                       ActivationKind act = ActivationKind::identity);

/// Genetic-algorithm training over the dataset's train split. Per
/// generation: breed (elites carried unchanged, tournament-of-3 parents,
/// crossover, per-gene mutation by resampling the init distribution),
/// optionally Adam-refine every individual, evaluate, record stats. Returns
/// the best individual of the final generation and the per-generation
/// history. All randomness derives from config.seed; fitness evaluation and
/// refinement parallelize over individuals without affecting results.
struct EvolveResult {
  Individual best;
  std::vector<GenerationStats> history;
};

EvolveResult evolve(const TopologySpec& topo, const Dataset& dataset,
                    const GaConfig& config, LossKind kind,
                    const std::vector<double>& classes = {},
                    ActivationKind act = ActivationKind::identity);

}  // namespace smarty
