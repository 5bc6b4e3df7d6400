// smarty - command-line front end: synthetic data generation, GA training,
// quantization, inference, TDC characterization and metric reports.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smarty/evaluate.hpp"
#include "smarty/ga.hpp"
#include "smarty/io.hpp"
#include "smarty/pet_sim.hpp"
#include "smarty/quantize.hpp"
#include "smarty/tdc.hpp"

namespace fs = std::filesystem;
using namespace smarty;

#ifndef SMARTY_VERSION
#define SMARTY_VERSION "0.0.0"
#endif

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) s += ' ';
    s += argv[i];
  }
  return s;
}

std::string hash_string(const std::string& s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(s)));
  return buf;
}

void emit_manifest(const fs::path& path, const std::string& command,
                   std::uint64_t seed, const std::string& config,
                   std::vector<std::string> inputs,
                   std::vector<std::string> outputs, const Timer& timer) {
  RunManifest m;
  m.command = command;
  m.seed = seed;
  m.config_hash = hash_string(config);
  m.inputs = std::move(inputs);
  m.outputs = std::move(outputs);
  m.tool_version = SMARTY_VERSION;
  m.wall_time_s = timer.seconds();
  write_manifest(path, m);
}

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    if (!cell.empty()) out.push_back(std::stod(cell));
  }
  return out;
}

std::vector<int> parse_csv_ints(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_csv_doubles(s)) out.push_back(static_cast<int>(v));
  return out;
}

LossKind parse_loss(const std::string& name) {
  if (name == "absolute_error") return LossKind::absolute_error;
  if (name == "squared_error") return LossKind::squared_error;
  if (name == "euclidean") return LossKind::euclidean_2d;
  if (name == "cross_entropy") return LossKind::cross_entropy;
  throw CLI::ValidationError("--loss", "unknown loss: " + name);
}

// ---------------------------------------------------------------- gen-data

struct GenDataOpts {
  std::string mode;
  std::string out;
  std::uint64_t seed = 1;
  std::string positions = "-57,0,65";
  std::int64_t frames = 2000;
  double separation_mm = 220.0;
  double sipm_efficiency = 0.8;
  double gamma_prob = 0.8;
  double tau_ns = 40.0;
  double jitter_fwhm_ps = 120.0;
  double frame_length_ns = 0.0;  // 0: auto, 5x the p99 detection time
  std::string widths = "10,20,30,40,50,60";
  double tdc_jitter_fwhm_ps = 120.0;
  std::string manifest;
};

int run_gen_data(const GenDataOpts& o, const std::string& config) {
  Timer timer;
  Dataset ds;
  if (o.mode == "coincidence") {
    CoincidenceConfig cfg;
    cfg.geometry.detector_separation_mm = o.separation_mm;
    cfg.geometry.source_positions_x = parse_csv_doubles(o.positions);
    cfg.sipm_efficiency = o.sipm_efficiency;
    cfg.gamma_detection_prob = o.gamma_prob;
    cfg.scint_tau_s = o.tau_ns * 1e-9;
    cfg.jitter_fwhm_s = o.jitter_fwhm_ps * 1e-12;
    std::vector<EventRecord> records;
    for (std::size_t p = 0; p < cfg.geometry.source_positions_x.size(); ++p) {
      Rng rng = Rng::derive(o.seed, 0x9e4d, p);
      auto part = simulate_coincidence(cfg, cfg.geometry.source_positions_x[p],
                                       o.frames, rng);
      records.insert(records.end(), part.begin(), part.end());
    }
    const double frame_length = o.frame_length_ns > 0.0
                                    ? o.frame_length_ns * 1e-9
                                    : 5.0 * detection_time_p99(records);
    ds = assemble_frames(records, default_bank(), frame_length,
                         cfg.geometry.source_positions_x, o.seed);
  } else if (o.mode == "single-shot") {
    const auto bank = default_bank(fwhm_to_sigma(o.tdc_jitter_fwhm_ps * 1e-12));
    ds = simulate_single_shot_sweep(parse_csv_ints(o.widths), o.frames, bank,
                                    o.seed);
  } else {
    throw CLI::ValidationError("--mode", "must be coincidence or single-shot");
  }
  write_dataset_jsonl(o.out, ds);
  std::cout << "wrote " << ds.frames.size() << " frames to " << o.out << "\n";
  const fs::path manifest =
      o.manifest.empty() ? fs::path(o.out + ".manifest.json") : fs::path(o.manifest);
  emit_manifest(manifest, "gen-data", o.seed, config, {}, {o.out}, timer);
  return 0;
}

// ------------------------------------------------------------------- train

struct TrainOpts {
  std::string topology;
  std::string dataset;
  std::string loss;
  std::string out = "coeffs.json";
  std::string history;
  std::uint64_t seed = 1;
  int population = 20;
  int generations = 30;
  double mutation_rate = 0.01;
  double gene_swap = 0.5;
  int elitism = 2;
  std::string crossover = "uniform";
  int adam_epochs = 0;
  double lr_start = 0.01;
  double lr_end = 0.001;
  std::string activation = "identity";
  std::string manifest;
};

int run_train(const TrainOpts& o, const std::string& config) {
  Timer timer;
  const auto topo = read_topology_json(o.topology);
  const auto ds = read_dataset_jsonl(o.dataset, o.seed);

  GaConfig cfg;
  cfg.population_size = o.population;
  cfg.generations = o.generations;
  cfg.mutation_rate = o.mutation_rate;
  cfg.gene_swap_prob = o.gene_swap;
  cfg.elitism_count = o.elitism;
  cfg.crossover = o.crossover == "single-point" ? CrossoverKind::single_point
                                                : CrossoverKind::uniform;
  cfg.seed = o.seed;
  if (o.adam_epochs > 0) {
    cfg.refine = AdamConfig{o.adam_epochs, o.lr_start, o.lr_end, 0.9, 0.999, 1e-8};
  }
  const LossKind kind = parse_loss(o.loss);
  const ActivationKind act =
      o.activation == "relu" ? ActivationKind::relu : ActivationKind::identity;
  const auto classes =
      kind == LossKind::cross_entropy ? dataset_classes(ds) : std::vector<double>{};

  const auto result = evolve(topo, ds, cfg, kind, classes, act);
  write_coefficients_json(o.out, result.best.coeffs);
  std::cout << "best training loss " << format_double(result.best.fitness)
            << " after " << result.history.size() << " generations\n";

  std::vector<std::string> outputs{o.out};
  if (!o.history.empty()) {
    std::vector<HistoryEntry> entries;
    for (const auto& h : result.history) {
      entries.push_back({h.generation, h.best_loss, h.mean_loss});
    }
    write_history_json(o.history, entries);
    outputs.push_back(o.history);
  }
  const fs::path manifest =
      o.manifest.empty() ? fs::path(o.out + ".manifest.json") : fs::path(o.manifest);
  emit_manifest(manifest, "train", o.seed, config, {o.topology, o.dataset},
                outputs, timer);
  return 0;
}

// ---------------------------------------------------------------- quantize

struct QuantizeOpts {
  std::string in;
  std::string out = "coeffs.bin";
  std::string method = "clipped";
  std::string manifest;
};

int run_quantize(const QuantizeOpts& o, const std::string& config) {
  Timer timer;
  const auto coeffs = read_coefficients_json(o.in);
  const auto method =
      o.method == "naive" ? QuantMethod::naive : QuantMethod::clipped;
  write_coefficient_image(o.out, quantize_set(coeffs, method));
  std::cout << "quantized " << coeffs.size() << " coefficients (" << o.method
            << ") to " << o.out << "\n";
  const fs::path manifest =
      o.manifest.empty() ? fs::path(o.out + ".manifest.json") : fs::path(o.manifest);
  emit_manifest(manifest, "quantize", 0, config, {o.in}, {o.out}, timer);
  return 0;
}

// ------------------------------------------------------------------- infer

struct InferOpts {
  std::string topology;
  std::string coeffs;
  std::string dataset;
  std::string mode = "golden";
  std::string task = "regression";
  std::string split = "validation";
  std::string method = "clipped";
  std::string out = "predictions.csv";
  std::string confusion_out;
  std::uint64_t seed = 1;
  std::string manifest;
};

int run_infer(const InferOpts& o, const std::string& config) {
  Timer timer;
  const auto topo = read_topology_json(o.topology);
  const auto ds = read_dataset_jsonl(o.dataset, o.seed);
  const TaskKind task = o.task == "classification" ? TaskKind::classification
                                                   : TaskKind::regression;
  const auto classes =
      task == TaskKind::classification ? dataset_classes(ds) : std::vector<double>{};

  std::vector<int> all_indices;
  std::span<const int> indices;
  if (o.split == "train") {
    indices = ds.train_indices;
  } else if (o.split == "all") {
    all_indices.resize(ds.frames.size());
    for (std::size_t i = 0; i < all_indices.size(); ++i) {
      all_indices[i] = static_cast<int>(i);
    }
    indices = all_indices;
  } else {
    indices = ds.validation_indices;
  }

  EvalReport report;
  if (o.mode == "fixed") {
    CoefficientSet real;
    if (fs::path(o.coeffs).extension() == ".bin") {
      const auto fixed = read_coefficient_image(
          o.coeffs, static_cast<std::size_t>(topo.coefficient_count()));
      real = dequantize_set(fixed);
    } else {
      real = read_coefficients_json(o.coeffs);
    }
    const auto method =
        o.method == "naive" ? QuantMethod::naive : QuantMethod::clipped;
    report = evaluate_quantized(topo, real, ds, indices, method, task, classes);
  } else {
    report = evaluate_golden(topo, read_coefficients_json(o.coeffs), ds,
                             indices, task, classes);
  }

  {
    std::ofstream out(o.out);
    if (!out) throw IoError("cannot open " + o.out + " for writing");
    out << "frame,prediction,label\n";
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const auto& f = ds.frames[static_cast<std::size_t>(indices[i])];
      out << indices[i] << "," << format_double(report.predictions[i]) << ","
          << format_double(f.label) << "\n";
    }
  }

  std::vector<std::string> outputs{o.out};
  if (task == TaskKind::classification) {
    std::printf("accuracy = %.4f\nprecision = %.4f\n", report.accuracy,
                report.precision);
    if (!o.confusion_out.empty()) {
      write_confusion_csv(o.confusion_out, report.matrix);
      outputs.push_back(o.confusion_out);
    }
  } else {
    std::printf("mae = %s\n", format_double(report.mae).c_str());
  }
  const fs::path manifest =
      o.manifest.empty() ? fs::path(o.out + ".manifest.json") : fs::path(o.manifest);
  emit_manifest(manifest, "infer", o.seed, config,
                {o.topology, o.coeffs, o.dataset}, outputs, timer);
  return 0;
}

// ---------------------------------------------------------------- tdc-char

struct TdcCharOpts {
  std::string out_dir = ".";
  int channel = -1;  // -1: all ten
  std::int64_t density_intervals = 100000;
  int density_codes = 256;
  double transfer_max_width_ps = 5350.0;
  double transfer_step_ps = 53.5;
  int transfer_reps = 200;
  double jitter_fwhm_ps = 0.0;
  double dnl_min = 0.0;  // both zero: no injected profile
  double dnl_max = 0.0;
  std::uint64_t seed = 1;
  std::string manifest;
};

int run_tdc_char(const TdcCharOpts& o, const std::string& config) {
  Timer timer;
  fs::create_directories(o.out_dir);
  std::vector<std::string> outputs;

  std::vector<double> profile;
  if (o.dnl_min != 0.0 || o.dnl_max != 0.0) {
    profile.resize(static_cast<std::size_t>(o.density_codes));
    for (int i = 0; i < o.density_codes; ++i) {
      const double s = std::sin(2.0 * std::numbers::pi * i / o.density_codes);
      profile[static_cast<std::size_t>(i)] = s >= 0 ? o.dnl_max * s : -o.dnl_min * s;
    }
  }

  const auto base = default_bank(fwhm_to_sigma(o.jitter_fwhm_ps * 1e-12));
  for (int c = 0; c < 10; ++c) {
    if (o.channel >= 0 && c != o.channel) continue;
    const TdcChannel ch(base[static_cast<std::size_t>(c)].lsb(), profile,
                        base[static_cast<std::size_t>(c)].jitter_sigma());
    Rng rng = Rng::derive(o.seed, 0x7dc0, static_cast<std::uint64_t>(c));

    // code-density histogram over [0, span)
    const double span = profile.empty()
                            ? o.density_codes * ch.lsb()
                            : ch.profile_span();
    std::vector<std::int64_t> hist(static_cast<std::size_t>(o.density_codes), 0);
    for (std::int64_t i = 0; i < o.density_intervals; ++i) {
      const auto code = ch.convert(0.0, rng.uniform(0.0, span), rng).result;
      if (code < o.density_codes) ++hist[static_cast<std::size_t>(code)];
    }
    const auto nl = code_density(hist);
    const auto density_path =
        fs::path(o.out_dir) / ("tdc" + std::to_string(c) + "_density.csv");
    {
      std::ofstream out(density_path);
      out << "code,count,dnl,inl\n";
      for (int i = 0; i < o.density_codes; ++i) {
        out << i << "," << hist[static_cast<std::size_t>(i)] << ","
            << format_double(nl.dnl[static_cast<std::size_t>(i)]) << ","
            << format_double(nl.inl[static_cast<std::size_t>(i)]) << "\n";
      }
    }
    outputs.push_back(density_path.string());

    // transfer function
    std::vector<double> widths;
    for (double w = 0.0; w <= o.transfer_max_width_ps; w += o.transfer_step_ps) {
      widths.push_back(w * 1e-12);
    }
    const auto tf = transfer_function(ch, widths, rng, o.transfer_reps);
    const auto transfer_path =
        fs::path(o.out_dir) / ("tdc" + std::to_string(c) + "_transfer.csv");
    {
      std::ofstream out(transfer_path);
      out << "width_ps,mean_code\n";
      for (const auto& [w, code] : tf) {
        out << format_double(w * 1e12) << "," << format_double(code) << "\n";
      }
    }
    outputs.push_back(transfer_path.string());
  }
  std::cout << "wrote " << outputs.size() << " characterization files to "
            << o.out_dir << "\n";
  const fs::path manifest = o.manifest.empty()
                                ? fs::path(o.out_dir) / "tdc-char.manifest.json"
                                : fs::path(o.manifest);
  emit_manifest(manifest, "tdc-char", o.seed, config, {}, outputs, timer);
  return 0;
}

// ------------------------------------------------------------------ report

struct ReportOpts {
  std::string confusion;
  std::string manifest;
};

int run_report(const ReportOpts& o, const std::string& config) {
  Timer timer;
  const auto matrix = read_confusion_csv(o.confusion);
  const auto mm = accuracy_precision(matrix);
  std::printf("accuracy = %.4f\nprecision = %.4f\n", mm.accuracy, mm.precision);
  for (std::size_t c = 0; c < matrix.classes.size(); ++c) {
    std::printf("class %s: accuracy = %.4f, precision = %.4f\n",
                format_double(matrix.classes[c]).c_str(),
                mm.per_class_accuracy[c], mm.per_class_precision[c]);
  }
  const fs::path manifest = o.manifest.empty()
                                ? fs::path(o.confusion + ".report.manifest.json")
                                : fs::path(o.manifest);
  emit_manifest(manifest, "report", 0, config, {o.confusion}, {}, timer);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smarty: reconfigurable fixed-point ANN emulator toolchain"};
  app.set_version_flag("--version", SMARTY_VERSION);
  app.require_subcommand(1);
  const std::string config = join_args(argc, argv);

  GenDataOpts gen;
  auto* cmd_gen = app.add_subcommand("gen-data", "generate synthetic datasets");
  cmd_gen->add_option("--mode", gen.mode, "coincidence or single-shot")->required();
  cmd_gen->add_option("--out", gen.out, "output JSONL path")->required();
  cmd_gen->add_option("--seed", gen.seed, "master seed");
  cmd_gen->add_option("--positions", gen.positions, "source positions [mm], CSV");
  cmd_gen->add_option("--frames", gen.frames, "events per position / frames per width");
  cmd_gen->add_option("--separation-mm", gen.separation_mm, "detector separation");
  cmd_gen->add_option("--sipm-efficiency", gen.sipm_efficiency, "per-SiPM firing probability");
  cmd_gen->add_option("--gamma-prob", gen.gamma_prob, "per-gamma detection probability");
  cmd_gen->add_option("--tau-ns", gen.tau_ns, "scintillation decay constant");
  cmd_gen->add_option("--jitter-fwhm-ps", gen.jitter_fwhm_ps, "timestamp jitter FWHM");
  cmd_gen->add_option("--frame-length-ns", gen.frame_length_ns,
                      "exposure window (0 = 5x p99 detection time)");
  cmd_gen->add_option("--widths", gen.widths, "single-shot EN widths [cycles], CSV");
  cmd_gen->add_option("--tdc-jitter-fwhm-ps", gen.tdc_jitter_fwhm_ps,
                      "single-shot TDC jitter FWHM");
  cmd_gen->add_option("--manifest", gen.manifest, "manifest path");

  TrainOpts train;
  auto* cmd_train = app.add_subcommand("train", "genetic-algorithm training");
  cmd_train->add_option("--topology", train.topology, "topology JSON")->required();
  cmd_train->add_option("--dataset", train.dataset, "dataset JSONL")->required();
  cmd_train->add_option("--loss", train.loss,
                        "absolute_error|squared_error|euclidean|cross_entropy")
      ->required();
  cmd_train->add_option("--out", train.out, "best coefficient JSON");
  cmd_train->add_option("--history", train.history, "per-generation history JSON");
  cmd_train->add_option("--seed", train.seed, "master seed");
  cmd_train->add_option("--population", train.population, "individuals per generation");
  cmd_train->add_option("--generations", train.generations, "GA generations");
  cmd_train->add_option("--mutation-rate", train.mutation_rate, "per-gene mutation rate");
  cmd_train->add_option("--gene-swap", train.gene_swap, "uniform crossover swap probability");
  cmd_train->add_option("--elitism", train.elitism, "elites carried unchanged");
  cmd_train->add_option("--crossover", train.crossover, "uniform|single-point");
  cmd_train->add_option("--adam-epochs", train.adam_epochs,
                        "Adam refinement epochs per individual (0 = off)");
  cmd_train->add_option("--lr-start", train.lr_start, "Adam initial learning rate");
  cmd_train->add_option("--lr-end", train.lr_end, "Adam final learning rate");
  cmd_train->add_option("--activation", train.activation, "identity|relu");
  cmd_train->add_option("--manifest", train.manifest, "manifest path");

  QuantizeOpts quant;
  auto* cmd_quant = app.add_subcommand("quantize", "real -> Q(10,8) conversion");
  cmd_quant->add_option("--in", quant.in, "real coefficient JSON")->required();
  cmd_quant->add_option("--out", quant.out, "fixed-point coefficient image");
  cmd_quant->add_option("--method", quant.method, "naive|clipped");
  cmd_quant->add_option("--manifest", quant.manifest, "manifest path");

  InferOpts infer;
  auto* cmd_infer = app.add_subcommand("infer", "run a model over a dataset");
  cmd_infer->add_option("--topology", infer.topology, "topology JSON")->required();
  cmd_infer->add_option("--coeffs", infer.coeffs, "coefficients (.json or .bin)")
      ->required();
  cmd_infer->add_option("--dataset", infer.dataset, "dataset JSONL")->required();
  cmd_infer->add_option("--mode", infer.mode, "golden|fixed");
  cmd_infer->add_option("--task", infer.task, "regression|classification");
  cmd_infer->add_option("--split", infer.split, "validation|train|all");
  cmd_infer->add_option("--method", infer.method,
                        "quantization method when --mode fixed reads JSON");
  cmd_infer->add_option("--out", infer.out, "predictions CSV");
  cmd_infer->add_option("--confusion-out", infer.confusion_out, "confusion CSV");
  cmd_infer->add_option("--seed", infer.seed, "dataset split seed");
  cmd_infer->add_option("--manifest", infer.manifest, "manifest path");

  TdcCharOpts tdc;
  auto* cmd_tdc = app.add_subcommand("tdc-char", "TDC characterization CSVs");
  cmd_tdc->add_option("--out-dir", tdc.out_dir, "output directory");
  cmd_tdc->add_option("--channel", tdc.channel, "single channel (default all)");
  cmd_tdc->add_option("--density-intervals", tdc.density_intervals,
                      "samples for the code-density test");
  cmd_tdc->add_option("--density-codes", tdc.density_codes, "histogram code range");
  cmd_tdc->add_option("--transfer-max-width-ps", tdc.transfer_max_width_ps,
                      "transfer sweep end");
  cmd_tdc->add_option("--transfer-step-ps", tdc.transfer_step_ps, "sweep step");
  cmd_tdc->add_option("--transfer-reps", tdc.transfer_reps, "conversions per width");
  cmd_tdc->add_option("--jitter-fwhm-ps", tdc.jitter_fwhm_ps, "channel jitter FWHM");
  cmd_tdc->add_option("--dnl-min", tdc.dnl_min, "injected DNL minimum [LSB]");
  cmd_tdc->add_option("--dnl-max", tdc.dnl_max, "injected DNL maximum [LSB]");
  cmd_tdc->add_option("--seed", tdc.seed, "master seed");
  cmd_tdc->add_option("--manifest", tdc.manifest, "manifest path");

  ReportOpts report;
  auto* cmd_report = app.add_subcommand("report", "metrics from saved artifacts");
  cmd_report->add_option("--confusion", report.confusion, "confusion CSV")
      ->required();
  cmd_report->add_option("--manifest", report.manifest, "manifest path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage errors
  }

  try {
    if (cmd_gen->parsed()) return run_gen_data(gen, config);
    if (cmd_train->parsed()) return run_train(train, config);
    if (cmd_quant->parsed()) return run_quantize(quant, config);
    if (cmd_infer->parsed()) return run_infer(infer, config);
    if (cmd_tdc->parsed()) return run_tdc_char(tdc, config);
    if (cmd_report->parsed()) return run_report(report, config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;  // data errors
  }
  return 0;
}
