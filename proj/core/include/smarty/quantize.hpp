#pragma once

#include <stdexcept>
#include <vector>

#include "smarty/fixedpoint.hpp"

namespace smarty {

struct NonFinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Real -> Q(10,8) coefficient conversion.
///   naive:   round, then wrap into 10 bits (two's-complement truncation).
///   clipped: clamp into the representable range, then round.
enum class QuantMethod { naive, clipped };

std::vector<FxValue> quantize_set(const std::vector<double>& coeffs,
                                  QuantMethod method);

/// Exact real values of a fixed-point set (raw / 2^frac per element).
std::vector<double> dequantize_set(const std::vector<FxValue>& coeffs);

}  // namespace smarty
