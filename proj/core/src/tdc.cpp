#include "smarty/tdc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace smarty {

TdcChannel::TdcChannel(double lsb, std::vector<double> dnl_profile,
                       double jitter_sigma)
    : lsb_(lsb), dnl_(std::move(dnl_profile)), jitter_sigma_(jitter_sigma) {
  boundaries_.reserve(dnl_.size() + 1);
  boundaries_.push_back(0.0);
  double edge = 0.0;
  for (double d : dnl_) {
    edge += lsb_ * (1.0 + d);
    boundaries_.push_back(edge);
  }
}

std::int64_t exact_floor_div(double num, double den) {
  if (num < den) return 0;  // double compare is exact over the rationals
  int en = 0, ed = 0;
  const double fn = std::frexp(num, &en);  // num = fn * 2^en, fn in [0.5, 1)
  const double fd = std::frexp(den, &ed);
  const auto mn = static_cast<unsigned long long>(std::ldexp(fn, 53));
  const auto md = static_cast<unsigned long long>(std::ldexp(fd, 53));
  // num/den = (mn/md) * 2^(en-ed); num >= den and mn/md in (1/2, 2) force
  // en - ed >= 0. Guard the shift so the 128-bit product cannot overflow.
  const int e = en - ed;
  if (e > 62) return std::numeric_limits<std::int64_t>::max();
  const unsigned __int128 q = (static_cast<unsigned __int128>(mn) << e) / md;
  return static_cast<std::int64_t>(q);
}

TdcCode TdcChannel::convert(double start_time, double stop_time, Rng& rng) const {
  if (stop_time < start_time) {
    throw NegativeInterval("stop precedes start");
  }
  double interval = stop_time - start_time;
  if (jitter_sigma_ > 0.0) interval += jitter_sigma_ * rng.gauss();
  if (interval < 0.0) interval = 0.0;

  std::int64_t ticks;
  if (!dnl_.empty() && interval < boundaries_.back()) {
    const auto it =
        std::upper_bound(boundaries_.begin(), boundaries_.end(), interval);
    ticks = static_cast<std::int64_t>(it - boundaries_.begin()) - 1;
  } else {
    const double rem = interval - (dnl_.empty() ? 0.0 : boundaries_.back());
    ticks = static_cast<std::int64_t>(dnl_.size()) + exact_floor_div(rem, lsb_);
  }
  ticks %= kTdcCodeSpan;

  TdcCode code;
  code.coarse = ticks >> 2;
  code.fine = static_cast<int>(ticks & 3);
  code.result = kTdcPhases * code.coarse + code.fine;
  return code;
}

int decode_fine(const std::array<bool, 4>& phase_bits) {
  int count = 0;
  while (count < 4 && phase_bits[count]) ++count;
  for (int i = count; i < 4; ++i) {
    if (phase_bits[i]) throw NonThermometer("gap in thermometer code");
  }
  if (count == 4) throw NonThermometer("all-ones is not a valid phase word");
  return count;
}

std::vector<std::pair<double, double>> transfer_function(
    const TdcChannel& channel, const std::vector<double>& widths, Rng& rng,
    int reps) {
  std::vector<std::pair<double, double>> out;
  out.reserve(widths.size());
  for (double w : widths) {
    double sum = 0.0;
    for (int r = 0; r < reps; ++r) {
      sum += static_cast<double>(channel.convert(0.0, w, rng).result);
    }
    out.emplace_back(w, sum / reps);
  }
  return out;
}

Nonlinearity code_density(const std::vector<std::int64_t>& histogram) {
  std::int64_t total = 0;
  for (auto c : histogram) total += c;
  if (histogram.empty() || total <= 0) {
    throw EmptyHistogram("code-density histogram has no counts");
  }
  const double mean =
      static_cast<double>(total) / static_cast<double>(histogram.size());
  Nonlinearity nl;
  nl.dnl.reserve(histogram.size());
  nl.inl.reserve(histogram.size());
  double running = 0.0;
  for (auto c : histogram) {
    const double d = static_cast<double>(c) / mean - 1.0;
    running += d;
    nl.dnl.push_back(d);
    nl.inl.push_back(running);
  }
  return nl;
}

std::vector<TdcChannel> default_bank(double jitter_sigma) {
  std::vector<TdcChannel> bank;
  bank.reserve(10);
  for (int i = 0; i < 10; ++i) {
    const double lsb = 52e-12 + 3e-12 * i / 9.0;
    bank.emplace_back(lsb, std::vector<double>{}, jitter_sigma);
  }
  return bank;
}

}  // namespace smarty
