#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "smarty/rng.hpp"
#include "smarty/tdc.hpp"

using namespace smarty;

namespace {

// Exact comparison k * d <= x over the rationals the doubles represent,
// via 128-bit integer arithmetic on the frexp decompositions.
bool leq_kd_x(std::int64_t k, double d, double x) {
  if (k <= 0) return x >= 0.0;
  int ex, ed;
  const double fx = std::frexp(x, &ex);
  const double fd = std::frexp(d, &ed);
  const auto mx = static_cast<__int128>(std::ldexp(fx, 53));
  const auto md = static_cast<__int128>(std::ldexp(fd, 53));
  const __int128 lhs = static_cast<__int128>(k) * md;
  const int e = ed - ex;  // k*md*2^e <= mx
  if (e >= 0) {
    if (e > 70) return false;
    return (lhs << e) <= mx;
  }
  const int s = -e;
  REQUIRE(s <= 70);  // test inputs keep x/d far below 2^70
  return lhs <= (mx << s);
}

// Independent oracle: candidate quotient from long-double division, then
// verified (and adjusted) with the exact comparisons above. Different
// algorithm from the implementation's direct 128-bit division.
std::int64_t oracle_floor_div(double x, double d) {
  if (x < d) return 0;
  auto cand = static_cast<std::int64_t>(
      floorl(static_cast<long double>(x) / static_cast<long double>(d)));
  while (cand > 0 && !leq_kd_x(cand, d, x)) --cand;
  while (leq_kd_x(cand + 1, d, x)) ++cand;
  return cand;
}

}  // namespace

TEST_CASE("result word combines coarse and fine per the 4x+f rule") {
  const TdcChannel ch(kNominalLsb);
  Rng rng(41);
  const auto code = ch.convert(0.0, 14.5 * kNominalLsb, rng);
  CHECK(code.coarse == 3);
  CHECK(code.fine == 2);
  CHECK(code.result == 14);
}

TEST_CASE("conversion examples") {
  const TdcChannel ch(kNominalLsb);
  Rng rng(42);
  CHECK(ch.convert(0.0, 0.0, rng).result == 0);

  // A 20-LSB interval: 20.5 * lsb sits safely mid-bin.
  CHECK(ch.convert(0.0, 20.5 * kNominalLsb, rng).result == 20);

  // The nominal-value pair (1.07 ns, 53.5 ps) quotients to 20 over the
  // reals, but the doubles land an ulp below the bin edge; the emulator is
  // exact over the doubles, so it must agree with the rational oracle.
  const auto oracle = oracle_floor_div(1.07e-9, kNominalLsb);
  CHECK(ch.convert(0.0, 1.07e-9, rng).result == oracle);

  CHECK_THROWS_AS(ch.convert(1.0, 0.5, rng), NegativeInterval);
}

TEST_CASE("bin edges are exact: dyadic LSB staircase") {
  const double lsb = std::ldexp(1.0, -34);  // ~58.2 ps, k*lsb exact in double
  const TdcChannel ch(lsb);
  Rng rng(43);
  for (int k = 0; k <= 100; ++k) {
    CHECK(ch.convert(0.0, k * lsb, rng).result == k);
  }
}

TEST_CASE("ideal conversion equals the rational oracle") {
  const TdcChannel ch(kNominalLsb);
  Rng rng(44);
  Rng conv_rng(45);
  for (int i = 0; i < 20000; ++i) {
    const double interval = rng.uniform(0.0, 200e-9);
    const auto code = ch.convert(0.0, interval, conv_rng);
    CHECK(code.result == oracle_floor_div(interval, kNominalLsb));
    CHECK(code.result == 4 * code.coarse + code.fine);
  }
}

TEST_CASE("long intervals wrap like the 20-bit counter") {
  const TdcChannel ch(kNominalLsb);
  Rng rng(46);
  for (int i = 0; i < 2000; ++i) {
    const double interval = rng.uniform(0.0, 500e-6);  // up to ~9.3M ticks
    const auto code = ch.convert(0.0, interval, rng);
    const auto expect = oracle_floor_div(interval, kNominalLsb) % kTdcCodeSpan;
    CHECK(code.result == expect);
    CHECK(code.coarse <= (std::int64_t{1} << 20) - 1);
    CHECK(code.result == 4 * code.coarse + code.fine);
  }
}

TEST_CASE("thermometer decoder") {
  CHECK(decode_fine({false, false, false, false}) == 0);
  CHECK(decode_fine({true, false, false, false}) == 1);
  CHECK(decode_fine({true, true, false, false}) == 2);
  CHECK(decode_fine({true, true, true, false}) == 3);
  CHECK_THROWS_AS(decode_fine({true, false, true, false}), NonThermometer);
  CHECK_THROWS_AS(decode_fine({false, true, false, false}), NonThermometer);
  CHECK_THROWS_AS(decode_fine({true, true, true, true}), NonThermometer);
}

TEST_CASE("transfer function of an ideal channel") {
  const TdcChannel ch(kNominalLsb);
  Rng rng(47);

  const auto zero = transfer_function(ch, {0.0}, rng, 100);
  CHECK(zero[0].second == 0.0);

  std::vector<double> widths;
  for (int k = 0; k <= 100; ++k) widths.push_back((k + 0.5) * kNominalLsb);
  const auto tf = transfer_function(ch, widths, rng, 50);
  for (int k = 0; k <= 100; ++k) {
    CHECK(tf[static_cast<std::size_t>(k)].second == static_cast<double>(k));
  }

  // Least-squares fit oracle: slope of code-vs-width must be 1/lsb.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(tf.size());
  for (const auto& [w, c] : tf) {
    sx += w;
    sy += c;
    sxx += w * w;
    sxy += w * c;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(1.0 / kNominalLsb).epsilon(1e-3));
}

TEST_CASE("transfer function is monotone and noisy channels average out") {
  const TdcChannel ch(kNominalLsb, {}, 20e-12);
  Rng rng(48);
  std::vector<double> widths;
  for (int k = 0; k < 40; ++k) widths.push_back(k * 10 * kNominalLsb);
  const auto tf = transfer_function(ch, widths, rng, 400);
  for (std::size_t i = 1; i < tf.size(); ++i) {
    CHECK(tf[i].second > tf[i - 1].second);
  }
}

TEST_CASE("code density formula") {
  const auto uniform = code_density({5, 5, 5, 5});
  for (double d : uniform.dnl) CHECK(d == 0.0);
  for (double v : uniform.inl) CHECK(v == 0.0);

  // mean 1.25: dnl = (0.6, -0.2, -0.2, -0.2), inl = running sum
  const auto nl = code_density({2, 1, 1, 1});
  CHECK(nl.dnl[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(nl.dnl[1] == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(nl.dnl[2] == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(nl.dnl[3] == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(nl.inl[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(nl.inl[1] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(nl.inl[2] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(nl.inl[3] == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(code_density({}), EmptyHistogram);
  CHECK_THROWS_AS(code_density({0, 0, 0}), EmptyHistogram);
}

TEST_CASE("DNL estimator always sums to ~zero") {
  Rng rng(49);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::int64_t> hist(64);
    for (auto& h : hist) h = rng.uniform_int(1, 1000);
    const auto nl = code_density(hist);
    double sum = 0.0;
    for (double d : nl.dnl) sum += d;
    CHECK(std::abs(sum) < 1e-9);
  }
}

TEST_CASE("injected DNL profile is recovered by the code-density test") {
  // Sine-shaped profile scaled to the +0.15 / -0.19 extremes.
  const int bins = 32;
  std::vector<double> dnl(bins);
  for (int i = 0; i < bins; ++i) {
    const double s = std::sin(2.0 * std::numbers::pi * i / bins);
    dnl[i] = s >= 0 ? 0.15 * s : 0.19 * s;
  }
  const TdcChannel ch(kNominalLsb, dnl);
  const double span = ch.profile_span();

  Rng rng(50);
  const int samples = 400000;
  std::vector<std::int64_t> hist(bins, 0);
  for (int i = 0; i < samples; ++i) {
    const auto code = ch.convert(0.0, rng.uniform(0.0, span), rng);
    REQUIRE(code.result < bins);
    ++hist[static_cast<std::size_t>(code.result)];
  }
  const auto recovered = code_density(hist);
  // The estimator measures widths against the mean bin width, so a profile
  // with nonzero mean is recovered renormalized: (1+dnl)/(1+mean) - 1.
  double mean_dnl = 0.0;
  for (double d : dnl) mean_dnl += d;
  mean_dnl /= bins;
  // 4 sigma per bin keeps the 32-bin union comfortably below 1%.
  const double tol = 4.0 / std::sqrt(static_cast<double>(samples) / bins);
  for (int i = 0; i < bins; ++i) {
    const double expect = (1.0 + dnl[static_cast<std::size_t>(i)]) / (1.0 + mean_dnl) - 1.0;
    CHECK(std::abs(recovered.dnl[static_cast<std::size_t>(i)] - expect) < tol);
  }
}

TEST_CASE("jitter spreads codes around the ideal value deterministically") {
  const TdcChannel ch(kNominalLsb, {}, fwhm_to_sigma(120e-12));
  const double width = 1000.5 * kNominalLsb;
  Rng a(51), b(51);
  double mean = 0.0, var = 0.0;
  std::vector<std::int64_t> first;
  for (int i = 0; i < 4000; ++i) {
    const auto r = ch.convert(0.0, width, a).result;
    first.push_back(r);
    mean += static_cast<double>(r);
  }
  mean /= 4000.0;
  for (auto r : first) var += (r - mean) * (r - mean);
  var /= 4000.0;
  CHECK(mean == doctest::Approx(1000.5).epsilon(0.01));
  CHECK(var > 0.2);  // sigma ~ 0.95 codes
  for (int i = 0; i < 4000; ++i) {
    CHECK(ch.convert(0.0, width, b).result == first[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("default bank averages the characterized LSB") {
  const auto bank = default_bank();
  REQUIRE(bank.size() == 10);
  double sum = 0.0;
  for (const auto& ch : bank) sum += ch.lsb();
  CHECK(sum / 10.0 == doctest::Approx(53.5e-12).epsilon(1e-12));
  for (std::size_t i = 1; i < bank.size(); ++i) {
    CHECK(bank[i].lsb() > bank[i - 1].lsb());
  }
}
