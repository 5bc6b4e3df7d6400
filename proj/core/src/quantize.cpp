#include "smarty/quantize.hpp"

#include <cmath>

namespace smarty {

std::vector<FxValue> quantize_set(const std::vector<double>& coeffs,
                                  QuantMethod method) {
  const FxFormat fmt = FxFormat::coefficient();
  const Overflow mode =
      method == QuantMethod::naive ? Overflow::wrap : Overflow::saturate;
  std::vector<FxValue> out;
  out.reserve(coeffs.size());
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw NonFinite("non-finite coefficient");
    out.push_back(to_fixed(c, fmt, mode));
  }
  return out;
}

std::vector<double> dequantize_set(const std::vector<FxValue>& coeffs) {
  std::vector<double> out;
  out.reserve(coeffs.size());
  for (const auto& c : coeffs) out.push_back(c.value());
  return out;
}

}  // namespace smarty
