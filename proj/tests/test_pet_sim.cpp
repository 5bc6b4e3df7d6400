#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "smarty/pet_sim.hpp"
#include "smarty/rng.hpp"

using namespace smarty;

namespace {

CoincidenceConfig test_config() {
  CoincidenceConfig cfg;
  cfg.geometry.source_positions_x = {-57.0, 0.0, 65.0};
  return cfg;
}

double mean_min_hit_difference(const std::vector<EventRecord>& records) {
  double sum = 0.0;
  int n = 0;
  for (const auto& rec : records) {
    double t1 = 1e9, t2 = 1e9;
    for (const auto& h : rec.hits) {
      (h.sipm_id <= 5 ? t1 : t2) = std::min(h.sipm_id <= 5 ? t1 : t2, h.time_s);
    }
    if (t1 < 1e8 && t2 < 1e8) {
      sum += t1 - t2;
      ++n;
    }
  }
  return n > 0 ? sum / n : 0.0;
}

}  // namespace

TEST_CASE("jitter width conversion") {
  CHECK(fwhm_to_sigma(120e-12) == doctest::Approx(50.96e-12).epsilon(1e-3));
}

TEST_CASE("source at the center is symmetric") {
  CoincidenceConfig cfg = test_config();
  cfg.scint_tau_s = 0.0;  // isolate photon flight + jitter
  Rng rng(81);
  const auto records = simulate_coincidence(cfg, 0.0, 20000, rng);
  CHECK(std::abs(mean_min_hit_difference(records)) < 5e-12);
}

TEST_CASE("arrival difference tracks the source position with slope 2/c") {
  CoincidenceConfig cfg = test_config();
  cfg.scint_tau_s = 0.0;
  Rng rng(82);

  // 65 mm -> 2*0.065/c = 433.6 ps
  const auto at65 = simulate_coincidence(cfg, 65.0, 20000, rng);
  CHECK(mean_min_hit_difference(at65) ==
        doctest::Approx(433.6e-12).epsilon(0.01));

  // regression of mean difference vs position over several positions
  const std::vector<double> xs{-80.0, -40.0, 0.0, 40.0, 80.0};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double x : xs) {
    const auto recs = simulate_coincidence(cfg, x, 10000, rng);
    const double d = mean_min_hit_difference(recs);
    sx += x;
    sy += d;
    sxx += x * x;
    sxy += x * d;
  }
  const auto n = static_cast<double>(xs.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double expect = 2.0e-3 / kSpeedOfLight;  // per mm
  CHECK(slope == doctest::Approx(expect).epsilon(0.01));
}

TEST_CASE("out-of-range sources throw") {
  Rng rng(83);
  CHECK_THROWS_AS(simulate_coincidence(test_config(), 110.0, 10, rng),
                  OutOfRangeSource);
  CHECK_THROWS_AS(simulate_coincidence(test_config(), -200.0, 10, rng),
                  OutOfRangeSource);
}

TEST_CASE("frame validity and labeling") {
  CoincidenceConfig cfg = test_config();
  Rng rng(84);
  const auto records = simulate_coincidence(cfg, 65.0, 4000, rng);
  const auto bank = default_bank();
  const auto ds =
      assemble_frames(records, bank, 2e-6, {-57.0, 0.0, 65.0}, 91);

  int non_valid = 0;
  for (const auto& f : ds.frames) {
    bool det1 = false, det2 = false;
    for (int c = 0; c < 10; ++c) {
      if (f.fired[c]) (c < 5 ? det1 : det2) = true;
      if (!f.fired[c]) CHECK(f.codes[c] == 0);  // sentinel
    }
    if (f.valid) {
      CHECK(det1);
      CHECK(det2);
      CHECK(f.label == 65.0);
    } else {
      CHECK(!(det1 && det2));
      CHECK(f.label == kNonValidLabel);
      ++non_valid;
    }
  }
  // gamma_detection_prob 0.8 leaves roughly a third of frames single-sided
  CHECK(non_valid > static_cast<int>(ds.frames.size()) / 5);
  CHECK(non_valid < static_cast<int>(ds.frames.size()) / 2);
}

TEST_CASE("all ten SiPMs firing yields ten codes") {
  CoincidenceConfig cfg = test_config();
  cfg.sipm_efficiency = 1.0;
  cfg.gamma_detection_prob = 1.0;
  Rng rng(85);
  const auto records = simulate_coincidence(cfg, 0.0, 50, rng);
  REQUIRE(records.size() == 50);
  const auto bank = default_bank();
  const auto ds = assemble_frames(records, bank, 0.0, {}, 92);
  for (const auto& f : ds.frames) {
    CHECK(f.valid);
    for (int c = 0; c < 10; ++c) CHECK(f.fired[c]);
  }
}

TEST_CASE("only the first timestamp per SiPM is kept") {
  EventRecord rec;
  rec.source_x_mm = 0.0;
  rec.hits = {{1, 50e-9}, {1, 10e-9}, {1, 80e-9}, {6, 20e-9}};
  const auto bank = default_bank();
  const auto ds = assemble_frames({rec}, bank, 0.0, {}, 93);
  REQUIRE(ds.frames.size() == 1);
  const auto& f = ds.frames[0];
  CHECK(f.valid);
  // 10 ns on channel 0 (52 ps LSB) -> 192 ticks
  CHECK(f.codes[0] == 192);
  CHECK(f.codes[5] > 0);
}

TEST_CASE("hits beyond the exposure window are dropped") {
  EventRecord rec;
  rec.hits = {{2, 10e-9}, {7, 500e-9}};
  const auto bank = default_bank();
  const auto ds = assemble_frames({rec}, bank, 100e-9, {}, 94);
  REQUIRE(ds.frames.size() == 1);
  CHECK(ds.frames[0].fired[1]);
  CHECK(!ds.frames[0].fired[6]);
  CHECK(!ds.frames[0].valid);  // detector 2 lost its only hit
}

TEST_CASE("split is 80/20, disjoint, exhaustive, deterministic") {
  Dataset ds;
  ds.frames.resize(1000);
  make_split(ds, 1234);
  CHECK(ds.train_indices.size() == 800);
  CHECK(ds.validation_indices.size() == 200);
  std::set<int> seen(ds.train_indices.begin(), ds.train_indices.end());
  for (int i : ds.validation_indices) CHECK(seen.insert(i).second);
  CHECK(seen.size() == 1000);

  Dataset ds2;
  ds2.frames.resize(1000);
  make_split(ds2, 1234);
  CHECK(ds2.train_indices == ds.train_indices);
  CHECK(ds2.validation_indices == ds.validation_indices);

  Dataset ds3;
  ds3.frames.resize(1000);
  make_split(ds3, 99);
  CHECK(ds3.train_indices != ds.train_indices);
}

TEST_CASE("single-shot datasets") {
  auto bank = default_bank();  // no jitter: exact codes

  SUBCASE("zero width gives zero codes") {
    const auto ds = simulate_single_shot(0, 20, bank, 95);
    for (const auto& f : ds.frames) {
      for (int c = 0; c < 5; ++c) {
        CHECK(f.fired[c]);
        CHECK(f.codes[c] == 0);
      }
      for (int c = 5; c < 10; ++c) CHECK(!f.fired[c]);
      CHECK(f.label == 0.0);
    }
  }

  SUBCASE("width 20 lands near the 100ns/53.5ps ideal code") {
    const auto ds = simulate_single_shot(20, 10, bank, 96);
    for (const auto& f : ds.frames) {
      CHECK(f.label == 20.0);
      // per-channel LSBs spread 52..55 ps -> codes 1818..1923
      for (int c = 0; c < 5; ++c) {
        CHECK(f.codes[c] > 1750);
        CHECK(f.codes[c] < 1990);
      }
    }
    // nominal-LSB ideal value: floor(100e-9 / 53.5e-12) = 1869
    const TdcChannel nominal(kNominalLsb);
    Rng rng(97);
    CHECK(nominal.convert(0.0, 20 * 5e-9, rng).result == 1869);
  }

  SUBCASE("mean codes increase stochastically with the width") {
    const auto jbank = default_bank(fwhm_to_sigma(120e-12));
    std::array<double, 5> prev{-1, -1, -1, -1, -1};
    for (int w : {5, 15, 25, 35, 45}) {
      const auto ds = simulate_single_shot(w, 200, jbank, 98);
      std::array<double, 5> mean{};
      for (const auto& f : ds.frames) {
        for (int c = 0; c < 5; ++c) mean[c] += static_cast<double>(f.codes[c]);
      }
      for (int c = 0; c < 5; ++c) {
        mean[c] /= static_cast<double>(ds.frames.size());
        CHECK(mean[c] > prev[c]);
        prev[c] = mean[c];
      }
    }
  }

  SUBCASE("sweep merges widths under one split") {
    const auto ds = simulate_single_shot_sweep({10, 20, 30}, 50, bank, 99);
    CHECK(ds.frames.size() == 150);
    CHECK(ds.train_indices.size() == 120);
    std::set<double> labels;
    for (const auto& f : ds.frames) labels.insert(f.label);
    CHECK(labels == std::set<double>{10.0, 20.0, 30.0});
  }
}

TEST_CASE("detection time percentile drives the default window") {
  CoincidenceConfig cfg = test_config();
  Rng rng(86);
  const auto records = simulate_coincidence(cfg, 0.0, 5000, rng);
  const double p99 = detection_time_p99(records);
  // dominated by the 40 ns scintillation tail: ln(100)*tau ~ 184 ns
  CHECK(p99 > 100e-9);
  CHECK(p99 < 300e-9);
}
