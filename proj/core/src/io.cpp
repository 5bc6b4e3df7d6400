#include "smarty/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace smarty {

namespace {

using nlohmann::json;

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

json parse(std::istream& in, const std::filesystem::path& path) {
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw IoError("malformed JSON in " + path.string());
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

TopologySpec read_topology_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  const json j = parse(in, path);
  if (!j.is_object() || !j.contains("layers") || !j["layers"].is_array()) {
    throw IoError("topology file must be {\"layers\":[...]}: " + path.string());
  }
  std::vector<int> layers;
  for (const auto& v : j["layers"]) {
    if (!v.is_number_integer()) throw IoError("non-integer layer size");
    layers.push_back(v.get<int>());
  }
  return build_fully_connected(layers);
}

void write_topology_json(const std::filesystem::path& path,
                         const TopologySpec& spec) {
  json j;
  j["layers"] = spec.layer_sizes;
  auto out = open_out(path);
  out << j.dump() << "\n";
}

TopologyImage read_topology_image(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  TopologyImage img;
  in.read(reinterpret_cast<char*>(img.topo_bytes.data()),
          static_cast<std::streamsize>(img.topo_bytes.size()));
  in.read(reinterpret_cast<char*>(img.neuron_bytes.data()),
          static_cast<std::streamsize>(img.neuron_bytes.size()));
  if (!in || in.peek() != EOF) {
    throw IoError("topology image must be exactly 590 bytes: " + path.string());
  }
  return img;
}

void write_topology_image(const std::filesystem::path& path,
                          const TopologyImage& image) {
  auto out = open_out(path, true);
  out.write(reinterpret_cast<const char*>(image.topo_bytes.data()),
            static_cast<std::streamsize>(image.topo_bytes.size()));
  out.write(reinterpret_cast<const char*>(image.neuron_bytes.data()),
            static_cast<std::streamsize>(image.neuron_bytes.size()));
}

CoefficientSet read_coefficients_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  const json j = parse(in, path);
  if (!j.is_array()) throw IoError("coefficient file must be a JSON array");
  CoefficientSet coeffs;
  coeffs.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw IoError("non-numeric coefficient");
    coeffs.push_back(v.get<double>());
  }
  return coeffs;
}

void write_coefficients_json(const std::filesystem::path& path,
                             const CoefficientSet& coeffs) {
  auto out = open_out(path);
  out << json(coeffs).dump() << "\n";
}

FixedCoefficientSet read_coefficient_image(const std::filesystem::path& path,
                                           std::size_t count) {
  if (count > static_cast<std::size_t>(kMaxCoefficients)) {
    throw IoError("coefficient image holds at most 1024 slots");
  }
  auto in = open_in(path, true);
  std::vector<char> bytes(2 * kMaxCoefficients);
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!in || in.peek() != EOF) {
    throw IoError("coefficient image must be exactly 2048 bytes: " +
                  path.string());
  }
  FixedCoefficientSet coeffs;
  coeffs.reserve(count);
  const FxFormat fmt = FxFormat::coefficient();
  for (std::size_t i = 0; i < count; ++i) {
    const auto lo = static_cast<std::uint8_t>(bytes[2 * i]);
    const auto hi = static_cast<std::uint8_t>(bytes[2 * i + 1]);
    const auto raw = static_cast<std::int16_t>(
        static_cast<std::uint16_t>(lo) | (static_cast<std::uint16_t>(hi) << 8));
    if (raw < fmt.min_raw() || raw > fmt.max_raw()) {
      throw IoError("slot " + std::to_string(i) +
                    " is not a sign-extended 10-bit value");
    }
    coeffs.push_back(FxValue{raw, fmt});
  }
  return coeffs;
}

void write_coefficient_image(const std::filesystem::path& path,
                             const FixedCoefficientSet& coeffs) {
  if (coeffs.size() > static_cast<std::size_t>(kMaxCoefficients)) {
    throw IoError("coefficient image holds at most 1024 slots");
  }
  auto out = open_out(path, true);
  for (std::size_t i = 0; i < static_cast<std::size_t>(kMaxCoefficients); ++i) {
    const std::int16_t raw =
        i < coeffs.size() ? static_cast<std::int16_t>(coeffs[i].raw) : 0;
    const auto u = static_cast<std::uint16_t>(raw);
    const char bytes[2] = {static_cast<char>(u & 0xff),
                           static_cast<char>(u >> 8)};
    out.write(bytes, 2);
  }
}

Dataset read_dataset_jsonl(const std::filesystem::path& path,
                           std::uint64_t split_seed) {
  auto in = open_in(path);
  Dataset ds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw IoError("malformed JSONL at line " + std::to_string(lineno));
    }
    Frame f;
    try {
      const auto& codes = j.at("codes");
      const auto& fired = j.at("fired");
      if (codes.size() != 10 || fired.size() != 10) {
        throw IoError("frame must carry 10 codes and 10 fired flags");
      }
      for (int c = 0; c < 10; ++c) {
        f.codes[c] = codes[c].get<std::int64_t>();
        f.fired[c] = fired[c].get<bool>();
      }
      f.label = j.at("label").get<double>();
      f.source_x_mm = j.at("source_x_mm").get<double>();
      f.valid = j.at("valid").get<bool>();
    } catch (const json::exception& e) {
      throw IoError("line " + std::to_string(lineno) + ": " + e.what());
    }
    ds.frames.push_back(f);
  }
  make_split(ds, split_seed);
  return ds;
}

void write_dataset_jsonl(const std::filesystem::path& path, const Dataset& ds) {
  auto out = open_out(path);
  for (const auto& f : ds.frames) {
    json j;
    j["codes"] = f.codes;
    j["fired"] = f.fired;
    j["label"] = f.label;
    j["source_x_mm"] = f.source_x_mm;
    j["valid"] = f.valid;
    out << j.dump() << "\n";
  }
}

void write_history_json(const std::filesystem::path& path,
                        const std::vector<HistoryEntry>& history) {
  json arr = json::array();
  for (const auto& h : history) {
    arr.push_back({{"generation", h.generation},
                   {"best_loss", h.best_loss},
                   {"mean_loss", h.mean_loss}});
  }
  auto out = open_out(path);
  out << arr.dump(2) << "\n";
}

void write_confusion_csv(const std::filesystem::path& path,
                         const ConfusionMatrix& matrix) {
  auto out = open_out(path);
  out << "class";
  for (double c : matrix.classes) out << "," << format_double(c);
  out << "\n";
  for (std::size_t r = 0; r < matrix.classes.size(); ++r) {
    out << format_double(matrix.classes[r]);
    for (auto v : matrix.counts[r]) out << "," << v;
    out << "\n";
  }
}

ConfusionMatrix read_confusion_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty confusion CSV");
  ConfusionMatrix m;
  {
    std::istringstream header(line);
    std::string cell;
    if (!std::getline(header, cell, ',') || cell != "class") {
      throw IoError("confusion CSV must start with a 'class' header");
    }
    while (std::getline(header, cell, ',')) m.classes.push_back(std::stod(cell));
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');  // actual-class label, order is fixed
    std::vector<std::int64_t> counts;
    while (std::getline(row, cell, ',')) counts.push_back(std::stoll(cell));
    if (counts.size() != m.classes.size()) {
      throw IoError("confusion CSV row width mismatch");
    }
    m.counts.push_back(std::move(counts));
  }
  if (m.counts.size() != m.classes.size()) {
    throw IoError("confusion CSV is not square");
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["config_hash"] = m.config_hash;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["tool_version"] = m.tool_version;
  j["wall_time_s"] = m.wall_time_s;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace smarty
