#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "smarty/rng.hpp"
#include "smarty/tdc.hpp"

namespace smarty {

struct OutOfRangeSource : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
/// Display label of the non-valid class: a position beyond the detector gap.
inline constexpr double kNonValidLabel = -120.0;

/// Two opposing detector boards, five A-SiPMs each, source movable on the
/// axis between them. Detector 1 sits at -separation/2 (SiPM IDs 1..5),
/// detector 2 at +separation/2 (IDs 6..10).
struct Geometry {
  double detector_separation_mm = 220.0;
  int sipms_per_detector = 5;
  std::array<double, 3> scintillator_mm{4.0, 4.0, 20.0};
  std::vector<double> source_positions_x;
};

/// Knobs of the simplified two-detector time-of-flight Monte Carlo. The
/// timestamp model per fired SiPM is
///   gamma arrival + exponential scintillation delay + Gaussian jitter.
/// gamma_detection_prob models a gamma escaping or missing its scintillator;
/// it is what produces single-detector (non-valid) frames at a realistic
/// rate, since per-SiPM inefficiency alone almost never empties a detector.
struct CoincidenceConfig {
  Geometry geometry;
  double scint_tau_s = 40e-9;        // LYSO-like decay constant
  double jitter_fwhm_s = 120e-12;    // imposed on the synthetic timestamps
  double sipm_efficiency = 0.8;      // per-SiPM firing probability
  double gamma_detection_prob = 0.8; // per-gamma interaction probability
};

struct SipmHit {
  int sipm_id;    // 1..10
  double time_s;  // since the annihilation at t = 0
};

/// Raw timestamp record of one annihilation event (one exposure frame).
struct EventRecord {
  double source_x_mm = 0.0;
  std::vector<SipmHit> hits;
};

/// One exposure: up to ten TDC codes indexed by A-SiPM ID (slot = ID - 1).
/// Channels that did not fire hold the sentinel code 0. valid is false iff
/// every fired channel belongs to a single detector (no coincidence); such
/// frames carry the -120 label.
struct Frame {
  std::array<std::int64_t, 10> codes{};
  std::array<bool, 10> fired{};
  double label = 0.0;
  bool valid = false;
  double source_x_mm = 0.0;

  /// First n channel codes as network inputs.
  std::vector<double> input_codes(int n) const {
    return std::vector<double>(codes.begin(), codes.begin() + n);
  }
};

struct Dataset {
  std::vector<Frame> frames;
  std::vector<int> train_indices;
  std::vector<int> validation_indices;
};

/// Seeded-shuffle 80/20 split over n frames: deterministic, disjoint,
/// exhaustive.
void make_split(Dataset& ds, std::uint64_t seed);

/// Simulates n_events annihilations from a source at source_x_mm. Both
/// gammas fly to opposite detectors; each SiPM of a detected gamma fires
/// independently. Events with no hit at all are dropped; one-detector
/// events are retained and later become non-valid frames.
std::vector<EventRecord> simulate_coincidence(const CoincidenceConfig& config,
                                              double source_x_mm,
                                              std::int64_t n_events, Rng& rng);

/// Frames from raw records: the first timestamp per A-SiPM inside the
/// exposure window is kept and converted by that SiPM's TDC channel; the
/// rest are dropped. Valid frames take their position as label when
/// class_positions is empty (regression) or verbatim from class_positions
/// membership (classification); non-valid frames get -120. Ends with the
/// seeded 80/20 split.
Dataset assemble_frames(const std::vector<EventRecord>& records,
                        const std::vector<TdcChannel>& bank,
                        double frame_length_s,
                        const std::vector<double>& class_positions,
                        std::uint64_t seed);

/// 99th percentile of all hit times, the basis of the default exposure
/// window (5x the percentile, chosen so multiple TDCs fire).
double detection_time_p99(const std::vector<EventRecord>& records);

/// Single-shot laser emulation: the first five channels of the bank each
/// convert an interval of en_width * 5 ns (one clock cycle = 5 ns) plus
/// per-channel jitter; the frame label is en_width.
Dataset simulate_single_shot(int en_width_cycles, std::int64_t n_frames,
                             const std::vector<TdcChannel>& bank,
                             std::uint64_t seed);

/// Multiple widths merged into one dataset with a single 80/20 split.
Dataset simulate_single_shot_sweep(const std::vector<int>& widths,
                                   std::int64_t frames_per_width,
                                   const std::vector<TdcChannel>& bank,
                                   std::uint64_t seed);

}  // namespace smarty
