#include "smarty/ga.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "smarty/parallel.hpp"
#include "smarty/rng.hpp"

namespace smarty {

namespace {
constexpr std::uint64_t kStreamInit = 0x6e17;
constexpr std::uint64_t kStreamBreed = 0xb2ed;
}  // namespace

double loss(LossKind kind, std::span<const double> prediction,
            std::span<const double> target) {
  switch (kind) {
    case LossKind::absolute_error:
      if (prediction.size() != 1 || target.size() != 1) {
        throw ShapeMismatch("absolute_error expects scalar prediction/target");
      }
      return std::abs(prediction[0] - target[0]);
    case LossKind::squared_error: {
      if (prediction.size() != 1 || target.size() != 1) {
        throw ShapeMismatch("squared_error expects scalar prediction/target");
      }
      const double d = prediction[0] - target[0];
      return d * d;
    }
    case LossKind::euclidean_2d: {
      if (prediction.size() != 2 || target.size() != 2) {
        throw ShapeMismatch("euclidean_2d expects 2-d prediction/target");
      }
      const double dx = prediction[0] - target[0];
      const double dy = prediction[1] - target[1];
      return std::sqrt(dx * dx + dy * dy);
    }
    case LossKind::cross_entropy: {
      if (target.size() != 1 || prediction.empty()) {
        throw ShapeMismatch("cross_entropy expects logits and a class index");
      }
      const int cls = static_cast<int>(target[0]);
      if (cls < 0 || cls >= static_cast<int>(prediction.size())) {
        throw ShapeMismatch("class index out of logit range");
      }
      const double mx = *std::max_element(prediction.begin(), prediction.end());
      double sum = 0.0;
      for (double p : prediction) sum += std::exp(p - mx);
      return std::log(sum) - (prediction[cls] - mx);
    }
  }
  throw ShapeMismatch("unknown loss kind");
}

namespace {

/// dL/dprediction for every loss kind, written into dldp.
void loss_gradient(LossKind kind, std::span<const double> prediction,
                   std::span<const double> target, std::span<double> dldp) {
  switch (kind) {
    case LossKind::absolute_error: {
      const double d = prediction[0] - target[0];
      dldp[0] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
      return;
    }
    case LossKind::squared_error:
      dldp[0] = 2.0 * (prediction[0] - target[0]);
      return;
    case LossKind::euclidean_2d: {
      const double dx = prediction[0] - target[0];
      const double dy = prediction[1] - target[1];
      const double norm = std::sqrt(dx * dx + dy * dy);
      dldp[0] = norm > 0.0 ? dx / norm : 0.0;
      dldp[1] = norm > 0.0 ? dy / norm : 0.0;
      return;
    }
    case LossKind::cross_entropy: {
      const int cls = static_cast<int>(target[0]);
      const double mx = *std::max_element(prediction.begin(), prediction.end());
      double sum = 0.0;
      for (double p : prediction) sum += std::exp(p - mx);
      for (std::size_t j = 0; j < prediction.size(); ++j) {
        dldp[j] = std::exp(prediction[j] - mx) / sum;
      }
      dldp[cls] -= 1.0;
      return;
    }
  }
}

void check_activation(ActivationKind act) {
  if (act != ActivationKind::identity && act != ActivationKind::relu) {
    throw NonDifferentiable("no analytic gradient for this activation");
  }
}

struct ForwardCache {
  std::vector<double> outputs;       // post-activation, per neuron
  std::vector<int> layer_offsets;    // first neuron index per layer
};

void forward(const TopologySpec& topo, std::span<const double> coeffs,
             std::span<const double> input, ActivationKind act,
             ForwardCache& cache) {
  const auto n_layers = topo.layer_sizes.size();
  cache.outputs.resize(topo.total_neurons());
  cache.layer_offsets.resize(n_layers);
  int neuron = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    cache.layer_offsets[l] = neuron;
    const int size = topo.layer_sizes[l];
    const bool output_layer = (l + 1 == n_layers);
    const int prev_off = l == 0 ? 0 : cache.layer_offsets[l - 1];
    for (int n = 0; n < size; ++n, ++neuron) {
      const auto& d = topo.neurons[neuron];
      const double* w = coeffs.data() + d.first_coeff_index;
      double acc = w[0];
      if (l == 0) {
        acc += w[1] * input[n];
      } else {
        const double* prev = cache.outputs.data() + prev_off;
        for (int j = 0; j < d.fan_in; ++j) acc += w[1 + j] * prev[j];
      }
      if (!output_layer && act == ActivationKind::relu && acc < 0.0) acc = 0.0;
      cache.outputs[neuron] = acc;
    }
  }
}

/// Backprop of one frame; adds coefficient gradients into grad.
double frame_loss_and_gradient(const TopologySpec& topo,
                               std::span<const double> coeffs,
                               std::span<const double> input,
                               std::span<const double> target, LossKind kind,
                               ActivationKind act, ForwardCache& cache,
                               std::vector<double>& delta,
                               std::vector<double>& delta_prev,
                               std::span<double> grad) {
  forward(topo, coeffs, input, act, cache);
  const auto n_layers = topo.layer_sizes.size();
  const int out_size = topo.output_size();
  const int out_off = cache.layer_offsets[n_layers - 1];
  const std::span<const double> prediction(cache.outputs.data() + out_off,
                                           out_size);
  const double frame_loss = loss(kind, prediction, target);

  delta.assign(out_size, 0.0);
  loss_gradient(kind, prediction, target, delta);

  for (std::size_t l = n_layers; l-- > 0;) {
    const int size = topo.layer_sizes[l];
    const int off = cache.layer_offsets[l];
    const int prev_size = l == 0 ? 0 : topo.layer_sizes[l - 1];
    const int prev_off = l == 0 ? 0 : cache.layer_offsets[l - 1];
    delta_prev.assign(prev_size, 0.0);
    for (int n = 0; n < size; ++n) {
      const double dz = delta[n];
      const auto& d = topo.neurons[off + n];
      double* g = grad.data() + d.first_coeff_index;
      const double* w = coeffs.data() + d.first_coeff_index;
      g[0] += dz;
      if (l == 0) {
        g[1] += dz * input[n];
      } else {
        const double* prev = cache.outputs.data() + prev_off;
        for (int j = 0; j < d.fan_in; ++j) {
          g[1 + j] += dz * prev[j];
          delta_prev[j] += w[1 + j] * dz;
        }
      }
    }
    if (l > 0) {
      // Activation derivative of the previous (non-output) layer.
      if (act == ActivationKind::relu) {
        const double* prev = cache.outputs.data() + prev_off;
        for (int j = 0; j < prev_size; ++j) {
          if (prev[j] <= 0.0) delta_prev[j] = 0.0;
        }
      }
      delta = delta_prev;
    }
  }
  return frame_loss;
}

}  // namespace

TrainingSet make_training_set(const Dataset& dataset,
                              std::span<const int> indices,
                              const TopologySpec& topo, LossKind kind,
                              const std::vector<double>& classes) {
  TrainingSet set;
  set.inputs.reserve(indices.size());
  set.targets.reserve(indices.size());
  const int n_in = topo.input_size();
  for (int idx : indices) {
    const Frame& f = dataset.frames[static_cast<std::size_t>(idx)];
    set.inputs.push_back(f.input_codes(n_in));
    switch (kind) {
      case LossKind::absolute_error:
      case LossKind::squared_error:
        set.targets.push_back({f.label});
        break;
      case LossKind::euclidean_2d:
        set.targets.push_back({f.label, 0.0});
        break;
      case LossKind::cross_entropy: {
        const auto it = std::find(classes.begin(), classes.end(), f.label);
        if (it == classes.end()) {
          throw ShapeMismatch("frame label " + std::to_string(f.label) +
                              " is not in the class list");
        }
        set.targets.push_back(
            {static_cast<double>(it - classes.begin())});
        break;
      }
    }
  }
  return set;
}

double average_loss(const TopologySpec& topo, std::span<const double> coeffs,
                    const TrainingSet& data, LossKind kind,
                    ActivationKind act) {
  if (data.size() == 0) throw EmptyDataset("no frames to evaluate");
  CoefficientSet c(coeffs.begin(), coeffs.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto out = infer_golden(topo, c, data.inputs[i], act);
    sum += loss(kind, out, data.targets[i]);
  }
  return sum / static_cast<double>(data.size());
}

double loss_and_gradient(const TopologySpec& topo,
                         std::span<const double> coeffs,
                         const TrainingSet& data, LossKind kind,
                         ActivationKind act, std::vector<double>& grad) {
  check_activation(act);
  if (data.size() == 0) throw EmptyDataset("no frames to evaluate");
  grad.assign(coeffs.size(), 0.0);
  ForwardCache cache;
  std::vector<double> delta, delta_prev;
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    sum += frame_loss_and_gradient(topo, coeffs, data.inputs[i],
                                   data.targets[i], kind, act, cache, delta,
                                   delta_prev, grad);
  }
  const double inv = 1.0 / static_cast<double>(data.size());
  for (double& g : grad) g *= inv;
  return sum * inv;
}

Individual adam_refine(Individual individual, const TopologySpec& topo,
                       const TrainingSet& train, LossKind kind,
                       const AdamConfig& config, ActivationKind act) {
  check_activation(act);
  if (config.epochs <= 0) return individual;
  const std::size_t n = individual.coeffs.size();
  std::vector<double> m(n, 0.0), v(n, 0.0), grad;
  for (int e = 0; e < config.epochs; ++e) {
    loss_and_gradient(topo, individual.coeffs, train, kind, act, grad);
    const double frac =
        config.epochs == 1 ? 0.0
                           : static_cast<double>(e) / (config.epochs - 1);
    const double lr = config.lr_start + (config.lr_end - config.lr_start) * frac;
    const double t = static_cast<double>(e + 1);
    const double bc1 = 1.0 - std::pow(config.beta1, t);
    const double bc2 = 1.0 - std::pow(config.beta2, t);
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      individual.coeffs[i] -= lr * mhat / (std::sqrt(vhat) + config.eps);
    }
  }
  return individual;
}

CoefficientSet crossover_genes(const CoefficientSet& a, const CoefficientSet& b,
                               const GaConfig& config, Rng& rng) {
  CoefficientSet child(a.size());
  if (config.crossover == CrossoverKind::uniform) {
    for (std::size_t g = 0; g < a.size(); ++g) {
      child[g] = rng.uniform01() < config.gene_swap_prob ? b[g] : a[g];
    }
  } else {
    const auto point = static_cast<std::size_t>(
        rng.uniform_int(1, static_cast<std::int64_t>(a.size()) - 1));
    for (std::size_t g = 0; g < a.size(); ++g) {
      child[g] = g < point ? a[g] : b[g];
    }
  }
  return child;
}

void mutate_genes(CoefficientSet& genes, const GaConfig& config, Rng& rng) {
  for (double& g : genes) {
    const double u = rng.uniform01();
    if (u < config.mutation_rate) g = rng.uniform(config.init_low, config.init_high);
  }
}

namespace {

int tournament3(const std::vector<Individual>& pop, Rng& rng) {
  int best = static_cast<int>(rng.uniform_int(0, static_cast<int>(pop.size()) - 1));
  for (int k = 0; k < 2; ++k) {
    const int c = static_cast<int>(
        rng.uniform_int(0, static_cast<int>(pop.size()) - 1));
    if (pop[c].fitness < pop[best].fitness) best = c;
  }
  return best;
}

}  // namespace

EvolveResult evolve(const TopologySpec& topo, const Dataset& dataset,
                    const GaConfig& config, LossKind kind,
                    const std::vector<double>& classes, ActivationKind act) {
  if (dataset.frames.empty() || dataset.train_indices.empty()) {
    throw EmptyDataset("training split is empty");
  }
  const TrainingSet train =
      make_training_set(dataset, dataset.train_indices, topo, kind, classes);
  const auto genes = static_cast<std::size_t>(topo.coefficient_count());
  const auto pop_size = static_cast<std::size_t>(config.population_size);

  std::vector<Individual> pop(pop_size);
  parallel_for(pop_size, [&](std::size_t i) {
    Rng rng = Rng::derive(config.seed, kStreamInit, i);
    pop[i].coeffs.resize(genes);
    for (double& g : pop[i].coeffs) {
      g = rng.uniform(config.init_low, config.init_high);
    }
  });
  auto evaluate_all = [&] {
    parallel_for(pop_size, [&](std::size_t i) {
      pop[i].fitness = average_loss(topo, pop[i].coeffs, train, kind, act);
    });
  };
  evaluate_all();

  auto best_index = [&] {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop_size; ++i) {
      if (pop[i].fitness < pop[best].fitness) best = i;
    }
    return best;
  };

  EvolveResult result;
  for (int g = 1; g <= config.generations; ++g) {
    // Breed the next generation (serial: one derived stream per generation).
    Rng rng = Rng::derive(config.seed, kStreamBreed, static_cast<std::uint64_t>(g));
    std::vector<std::size_t> order(pop_size);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pop[a].fitness < pop[b].fitness;
    });
    std::vector<Individual> next;
    next.reserve(pop_size);
    for (int e = 0; e < config.elitism_count; ++e) {
      next.push_back(pop[order[static_cast<std::size_t>(e)]]);
    }
    while (next.size() < pop_size) {
      const int pa = tournament3(pop, rng);
      const int pb = tournament3(pop, rng);
      Individual child;
      child.coeffs = crossover_genes(pop[static_cast<std::size_t>(pa)].coeffs,
                                     pop[static_cast<std::size_t>(pb)].coeffs,
                                     config, rng);
      mutate_genes(child.coeffs, config, rng);
      next.push_back(std::move(child));
    }
    pop.swap(next);

    if (config.refine && config.refine->epochs > 0) {
      parallel_for(pop_size, [&](std::size_t i) {
        pop[i] = adam_refine(std::move(pop[i]), topo, train, kind,
                             *config.refine, act);
      });
    }
    evaluate_all();

    GenerationStats stats;
    stats.generation = g;
    stats.best_loss = pop[best_index()].fitness;
    double mean = 0.0;
    for (const auto& ind : pop) mean += ind.fitness;
    stats.mean_loss = mean / static_cast<double>(pop_size);
    result.history.push_back(stats);
  }

  result.best = pop[best_index()];
  return result;
}

}  // namespace smarty
