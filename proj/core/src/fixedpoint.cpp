#include "smarty/fixedpoint.hpp"

#include <cmath>
#include <limits>

namespace smarty {

namespace {

std::int64_t wrap_raw(std::int64_t r, const FxFormat& fmt) {
  const std::uint64_t mask = (fmt.total_bits == 64)
                                 ? ~std::uint64_t{0}
                                 : (std::uint64_t{1} << fmt.total_bits) - 1;
  std::uint64_t u = static_cast<std::uint64_t>(r) & mask;
  if (fmt.is_signed && (u >> (fmt.total_bits - 1)) != 0) {
    return static_cast<std::int64_t>(u) -
           (std::int64_t{1} << fmt.total_bits);
  }
  return static_cast<std::int64_t>(u);
}

std::int64_t clamp_raw(std::int64_t r, const FxFormat& fmt) {
  if (r < fmt.min_raw()) return fmt.min_raw();
  if (r > fmt.max_raw()) return fmt.max_raw();
  return r;
}

}  // namespace

FxValue to_fixed(double x, FxFormat fmt, Overflow mode) {
  const double scaled = x * static_cast<double>(std::int64_t{1} << fmt.frac_bits);
  // std::llround rounds half away from zero, the convention used everywhere.
  std::int64_t r;
  if (std::abs(scaled) < 0x1.0p62) {
    r = std::llround(scaled);
  } else {
    // Out of llround's safe range: the value is astronomically out of any
    // <=32-bit format, so saturation is exact and wrap uses fmod residue.
    if (mode == Overflow::saturate) {
      r = scaled > 0 ? fmt.max_raw() : fmt.min_raw();
    } else {
      const double span = std::ldexp(1.0, fmt.total_bits);
      r = std::llround(std::fmod(scaled, span));
    }
  }
  r = mode == Overflow::wrap ? wrap_raw(r, fmt) : clamp_raw(r, fmt);
  return FxValue{r, fmt};
}

std::int64_t rounding_shift_right(std::int64_t v, int k) {
  if (k <= 0) return v << -k;
  const std::int64_t bias = std::int64_t{1} << (k - 1);
  if (v >= 0) return (v + bias) >> k;
  return -((-v + bias) >> k);
}

FxValue fx_mac(FxValue acc, FxValue a, FxValue b) {
  const std::int64_t product = a.raw * b.raw;
  const int shift = a.format.frac_bits + b.format.frac_bits - acc.format.frac_bits;
  const std::int64_t term = rounding_shift_right(product, shift);
  const std::int64_t sum = acc.raw + term;
  return FxValue{clamp_raw(sum, acc.format), acc.format};
}

double relative_error(double golden, double approx) {
  const double diff = std::abs(golden - approx);
  if (std::abs(golden) > 1e-12) return diff / std::abs(golden);
  return diff;
}

}  // namespace smarty
