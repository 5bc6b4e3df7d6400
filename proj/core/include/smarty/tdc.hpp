#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "smarty/rng.hpp"

namespace smarty {

struct NegativeInterval : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonThermometer : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyHistogram : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kTdcCounterBits = 20;
inline constexpr int kTdcPhases = 4;
/// Counter rollover span: codes wrap modulo 4 * 2^20.
inline constexpr std::int64_t kTdcCodeSpan = std::int64_t{kTdcPhases}
                                             << kTdcCounterBits;
inline constexpr double kNominalLsb = 53.5e-12;

/// Final TDC word: result = 4 * coarse + fine, the coarse part from the
/// 20-bit ripple counter and the fine part from the decoded ring phases.
struct TdcCode {
  std::int64_t coarse = 0;
  int fine = 0;
  std::int64_t result = 0;
};

/// One ring-oscillator TDC channel. Nonlinearity is injected by warping the
/// tick boundaries: code i spans lsb * (1 + dnl[i]) seconds for i inside the
/// profile and exactly lsb beyond it, which makes the code-density estimator
/// an exact inverse in expectation. Jitter is additive Gaussian on the
/// measured interval.
class TdcChannel {
 public:
  TdcChannel() : TdcChannel(kNominalLsb) {}
  explicit TdcChannel(double lsb, std::vector<double> dnl_profile = {},
                      double jitter_sigma = 0.0);

  double lsb() const { return lsb_; }
  double jitter_sigma() const { return jitter_sigma_; }
  const std::vector<double>& dnl_profile() const { return dnl_; }
  /// Warped upper boundary of code i (boundary(0) == 0 is the lower edge).
  double profile_span() const { return boundaries_.empty() ? 0.0 : boundaries_.back(); }

  /// Time interval -> code. The effective interval is (stop - start) plus
  /// Gaussian jitter, clamped at zero; tick count is the warped-bin index
  /// (exact rational floor against lsb outside the profile); counts wrap
  /// modulo 4 * 2^20. Throws NegativeInterval when stop < start.
  TdcCode convert(double start_time, double stop_time, Rng& rng) const;

 private:
  double lsb_;
  std::vector<double> dnl_;
  double jitter_sigma_;
  std::vector<double> boundaries_;  // cumulative warped bin edges, size dnl+1
};

/// Thermometer decode of the four frozen ring phases:
/// 0000 -> 0, 1000 -> 1, 1100 -> 2, 1110 -> 3. Anything else throws.
int decode_fine(const std::array<bool, 4>& phase_bits);

/// Mean code over `reps` conversions of each width.
std::vector<std::pair<double, double>> transfer_function(
    const TdcChannel& channel, const std::vector<double>& widths, Rng& rng,
    int reps = 1000);

/// Code-density estimate over a contiguous code range:
/// dnl[i] = count[i] / mean(count) - 1, inl[i] = sum of dnl[0..i].
struct Nonlinearity {
  std::vector<double> dnl;
  std::vector<double> inl;
};

Nonlinearity code_density(const std::vector<std::int64_t>& histogram);

/// The ten-channel bank. Per-channel LSBs are evenly spread over
/// [52 ps, 55 ps] (mean 53.5 ps); exact per-channel values are a modeling
/// choice, only the average is characterized.
std::vector<TdcChannel> default_bank(double jitter_sigma = 0.0);

/// floor(num / den) computed exactly over the rationals represented by the
/// two doubles (num >= 0, den > 0). Plain double division can land on the
/// wrong side of a tick boundary; this cannot.
std::int64_t exact_floor_div(double num, double den);

}  // namespace smarty
