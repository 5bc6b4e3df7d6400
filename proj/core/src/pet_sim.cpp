#include "smarty/pet_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace smarty {

namespace {
// Substream tags keeping the module's RNG streams disjoint.
constexpr std::uint64_t kStreamSplit = 0x5b17;
constexpr std::uint64_t kStreamEvent = 0xe7e2;
constexpr std::uint64_t kStreamFrame = 0xf4a3;
constexpr std::uint64_t kStreamShot = 0x5057;
}  // namespace

void make_split(Dataset& ds, std::uint64_t seed) {
  const auto n = static_cast<int>(ds.frames.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  Rng rng = Rng::derive(seed, kStreamSplit);
  for (int i = n - 1; i > 0; --i) {  // Fisher-Yates, engine-independent
    const auto j = static_cast<int>(rng.uniform_int(0, i));
    std::swap(order[i], order[j]);
  }
  const int n_train = static_cast<int>(4 * static_cast<std::int64_t>(n) / 5);
  ds.train_indices.assign(order.begin(), order.begin() + n_train);
  ds.validation_indices.assign(order.begin() + n_train, order.end());
}

std::vector<EventRecord> simulate_coincidence(const CoincidenceConfig& config,
                                              double source_x_mm,
                                              std::int64_t n_events, Rng& rng) {
  const Geometry& g = config.geometry;
  const double half = g.detector_separation_mm / 2.0;
  if (!(source_x_mm > -half && source_x_mm < half)) {
    throw OutOfRangeSource("source at " + std::to_string(source_x_mm) +
                           " mm is outside the detector gap");
  }
  // Detector 1 at -half, detector 2 at +half; times in seconds.
  const double arrival[2] = {(half + source_x_mm) * 1e-3 / kSpeedOfLight,
                             (half - source_x_mm) * 1e-3 / kSpeedOfLight};
  const double jitter_sigma = fwhm_to_sigma(config.jitter_fwhm_s);
  const std::uint64_t base = rng.next();

  std::vector<EventRecord> records;
  records.reserve(static_cast<std::size_t>(n_events));
  for (std::int64_t e = 0; e < n_events; ++e) {
    // Independent per-event stream: event order cannot leak between events,
    // so generation could be parallelized without changing the output.
    Rng er = Rng::derive(base, kStreamEvent, static_cast<std::uint64_t>(e));
    EventRecord rec;
    rec.source_x_mm = source_x_mm;
    for (int d = 0; d < 2; ++d) {
      if (er.uniform01() >= config.gamma_detection_prob) continue;
      for (int s = 0; s < g.sipms_per_detector; ++s) {
        if (er.uniform01() >= config.sipm_efficiency) continue;
        double t = arrival[d] + er.exponential(config.scint_tau_s) +
                   jitter_sigma * er.gauss();
        if (t < 0.0) t = 0.0;
        rec.hits.push_back({d * g.sipms_per_detector + s + 1, t});
      }
    }
    if (!rec.hits.empty()) records.push_back(std::move(rec));
  }
  return records;
}

double detection_time_p99(const std::vector<EventRecord>& records) {
  std::vector<double> times;
  for (const auto& rec : records)
    for (const auto& h : rec.hits) times.push_back(h.time_s);
  if (times.empty()) return 0.0;
  std::sort(times.begin(), times.end());
  const auto idx = static_cast<std::size_t>(0.99 * (times.size() - 1));
  return times[idx];
}

Dataset assemble_frames(const std::vector<EventRecord>& records,
                        const std::vector<TdcChannel>& bank,
                        double frame_length_s,
                        const std::vector<double>& class_positions,
                        std::uint64_t seed) {
  Dataset ds;
  ds.frames.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    Frame f;
    f.source_x_mm = rec.source_x_mm;
    std::array<double, 10> first_time{};
    for (const auto& h : rec.hits) {
      if (frame_length_s > 0.0 && h.time_s > frame_length_s) continue;
      const int slot = h.sipm_id - 1;
      if (!f.fired[slot] || h.time_s < first_time[slot]) {
        f.fired[slot] = true;
        first_time[slot] = h.time_s;
      }
    }
    Rng fr = Rng::derive(seed, kStreamFrame, i);
    bool det1 = false, det2 = false;
    for (int slot = 0; slot < 10; ++slot) {
      if (!f.fired[slot]) continue;
      f.codes[slot] = bank[slot].convert(0.0, first_time[slot], fr).result;
      (slot < 5 ? det1 : det2) = true;
    }
    f.valid = det1 && det2;
    if (!f.valid) {
      f.label = kNonValidLabel;
    } else if (class_positions.empty()) {
      f.label = rec.source_x_mm;
    } else {
      // Classification: snap to the nearest listed class position.
      double best = class_positions.front();
      for (double p : class_positions) {
        if (std::abs(p - rec.source_x_mm) < std::abs(best - rec.source_x_mm)) {
          best = p;
        }
      }
      f.label = best;
    }
    ds.frames.push_back(f);
  }
  make_split(ds, seed);
  return ds;
}

Dataset simulate_single_shot(int en_width_cycles, std::int64_t n_frames,
                             const std::vector<TdcChannel>& bank,
                             std::uint64_t seed) {
  const double width_s = en_width_cycles * 5e-9;
  const int channels = static_cast<int>(std::min<std::size_t>(5, bank.size()));
  Dataset ds;
  ds.frames.reserve(static_cast<std::size_t>(n_frames));
  for (std::int64_t i = 0; i < n_frames; ++i) {
    Rng fr = Rng::derive(seed ^ static_cast<std::uint64_t>(en_width_cycles),
                         kStreamShot, static_cast<std::uint64_t>(i));
    Frame f;
    f.label = en_width_cycles;
    f.valid = true;
    for (int c = 0; c < channels; ++c) {
      f.codes[c] = bank[c].convert(0.0, width_s, fr).result;
      f.fired[c] = true;
    }
    ds.frames.push_back(f);
  }
  make_split(ds, seed);
  return ds;
}

Dataset simulate_single_shot_sweep(const std::vector<int>& widths,
                                   std::int64_t frames_per_width,
                                   const std::vector<TdcChannel>& bank,
                                   std::uint64_t seed) {
  Dataset ds;
  for (int w : widths) {
    Dataset part = simulate_single_shot(w, frames_per_width, bank, seed);
    ds.frames.insert(ds.frames.end(), part.frames.begin(), part.frames.end());
  }
  make_split(ds, seed);
  return ds;
}

}  // namespace smarty
