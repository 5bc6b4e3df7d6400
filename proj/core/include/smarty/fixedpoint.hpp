#pragma once

#include <cstdint>
#include <stdexcept>

namespace smarty {

/// Q(total_bits, frac_bits) two's-complement fixed-point format.
/// The datapath uses two formats: Q(10,8) signed for coefficients
/// (10.24 kbit memory / 1024 slots = 10 bits each) and Q(32,8) signed for
/// activations and the accumulator.
struct FxFormat {
  int total_bits;
  int frac_bits;
  bool is_signed;

  static constexpr FxFormat coefficient() { return {10, 8, true}; }
  static constexpr FxFormat accumulator() { return {32, 8, true}; }

  constexpr bool valid() const {
    return frac_bits >= 1 && frac_bits < total_bits && total_bits <= 32;
  }
  constexpr std::int64_t min_raw() const {
    return is_signed ? -(std::int64_t{1} << (total_bits - 1)) : 0;
  }
  constexpr std::int64_t max_raw() const {
    return (std::int64_t{1} << (total_bits - (is_signed ? 1 : 0))) - 1;
  }
  constexpr double lsb() const {
    return 1.0 / static_cast<double>(std::int64_t{1} << frac_bits);
  }
  constexpr bool operator==(const FxFormat&) const = default;
};

/// One fixed-point number: raw two's-complement payload plus its format.
/// The represented value is exactly raw / 2^frac_bits.
struct FxValue {
  std::int64_t raw = 0;
  FxFormat format = FxFormat::coefficient();

  double value() const {
    return static_cast<double>(raw) * format.lsb();
  }
  constexpr bool operator==(const FxValue&) const = default;
};

enum class Overflow { wrap, saturate };

/// Real -> fixed conversion. Rounds half away from zero, then either wraps
/// the rounded integer modulo 2^total_bits (two's-complement truncation) or
/// clamps it to the representable extremes.
FxValue to_fixed(double x, FxFormat fmt, Overflow mode);

/// acc + (a * b), everything in raw fixed-point arithmetic. The product
/// a.raw * b.raw (frac bits add) is rounded half away from zero when shifted
/// back to acc's frac_bits, then added; the sum saturates at acc's extremes.
FxValue fx_mac(FxValue acc, FxValue a, FxValue b);

/// |golden - approx| / |golden|, falling back to the absolute difference
/// when |golden| <= 1e-12 so zero outputs cannot divide by zero.
double relative_error(double golden, double approx);

/// Shift v right by k bits, rounding half away from zero.
std::int64_t rounding_shift_right(std::int64_t v, int k);

}  // namespace smarty
