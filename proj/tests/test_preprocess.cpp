#include <doctest.h>

#include <cmath>
#include <numeric>

#include "specid/error.hpp"
#include "specid/preprocess.hpp"
#include "support/generators.hpp"
#include "support/mpfr_oracle.hpp"

using namespace specid;
using namespace specid::preprocess;
using io::Peak;

TEST_CASE("normalize") {
  const std::vector<Peak> p{{50, 999}, {77, 120}};
  const auto n = normalize(p);
  CHECK(n[0].intensity == 1.0);
  CHECK(n[1].intensity == doctest::Approx(120.0 / 999.0).epsilon(1e-15));
  CHECK(normalize(n) == n);
  CHECK_THROWS_AS(normalize(std::vector<Peak>{{1, 0}, {2, 0}}), AllZeroIntensities);
  CHECK_THROWS_AS(normalize(std::vector<Peak>{}), AllZeroIntensities);
}

TEST_CASE("round_mz") {
  auto one = [](double mz) { return round_mz(std::vector<Peak>{{mz, 1.0}}).at(0).mz; };
  CHECK(one(77.4) == 77);
  CHECK(one(77.5) == 78);
  CHECK(one(0.49) == 0);

  const auto apart = round_mz(std::vector<Peak>{{77.4, 0.5}, {77.6, 0.5}});
  REQUIRE(apart.size() == 2);
  CHECK(apart[0].mz == 77);
  CHECK(apart[1].mz == 78);

  const auto merged = round_mz(std::vector<Peak>{{77.4, 0.6}, {76.8, 0.6}});
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].mz == 77);
  CHECK(merged[0].intensity == 1.0);

  const auto m = merge_rounded(std::vector<Peak>{{10.2, 0.25}, {9.9, 0.5}, {20.0, 0.0}, {30, 1}});
  REQUIRE(m.size() == 2);
  CHECK(m[0].intensity == 0.75);
  CHECK(m[1].mz == 30);
}

TEST_CASE("bin_intensity: fixed points") {
  const BinningConfig cfg;  // 1.28 / 29
  CHECK(bin_intensity(1.0, cfg) == 29);
  CHECK(bin_intensity(1.0, {2.2, 9}) == 9);
  CHECK(bin_intensity(0.5, cfg) == 26);
  CHECK(bin_intensity(1e-9, cfg) == 0);
  CHECK(bin_intensity(std::numeric_limits<double>::denorm_min(), cfg) == 0);
  CHECK_THROWS_AS(bin_intensity(0.0, cfg), DomainError);
  CHECK_THROWS_AS(bin_intensity(1.0000001, cfg), DomainError);
  CHECK_THROWS_AS(bin_intensity(std::nan(""), cfg), DomainError);
}

TEST_CASE("bin_intensity: agrees with 256-bit evaluation") {
  testing::MpfrBinning oracle;
  testing::Rng rng(77);
  const std::pair<double, int> configs[] = {{2.2, 9}, {1.43, 20}, {1.28, 29}, {1.2, 39}};
  int mismatches = 0;
  for (int t = 0; t < 20000; ++t) {
    double i = testing::uniform(rng);
    if (t % 4 == 0) i = std::pow(10.0, -12.0 * testing::uniform(rng));
    if (i == 0.0) continue;
    oracle.set_intensity(i);
    for (const auto& [b, s] : configs)
      if (bin_intensity(i, {b, s}) != oracle.bin(b, s)) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("bin_intensity: powers of the base sit on bin edges") {
  testing::MpfrBinning oracle;
  const std::pair<double, int> configs[] = {{2.2, 9}, {1.43, 20}, {1.28, 29}, {1.2, 39}, {2.0, 29}};
  for (const auto& [b, s] : configs) {
    for (int e = 1; e <= s + 2; ++e) {
      const double edge = std::pow(b, -e);
      for (double i : {std::nextafter(edge, 0.0), edge, std::nextafter(edge, 2.0)}) {
        if (i <= 0.0 || i > 1.0) continue;
        CHECK(bin_intensity(i, {b, s}) == oracle.bin(i, b, s));
      }
    }
  }
}

TEST_CASE("binning config validation") {
  CHECK_THROWS_AS(BinningConfig({1.0, 29}).validate(), ConfigError);
  CHECK_THROWS_AS(BinningConfig({1.28, 0}).validate(), ConfigError);
  CHECK_NOTHROW(BinningConfig({1.28, 1}).validate());
  CHECK(BinningConfig{}.num_bins() == 30);
}

TEST_CASE("histogram conserves the sample") {
  testing::Rng rng(3);
  std::vector<double> x;
  for (int t = 0; t < 5000; ++t) x.push_back(std::max(testing::uniform(rng), 1e-300));
  const BinningConfig cfg;
  const auto h = bin_histogram(x, cfg);
  CHECK(h.size() == 30);
  CHECK(std::accumulate(h.begin(), h.end(), std::size_t{0}) == x.size());
}

TEST_CASE("fit_log_base recovers a constructed base") {
  for (double b0 : {1.2, 1.5}) {
    testing::Rng rng(static_cast<std::uint64_t>(b0 * 1000));
    std::vector<double> x;
    for (int t = 0; t < 20000; ++t) x.push_back(std::pow(b0, -testing::uniform(rng) * 30.0));
    const auto fit = fit_log_base(x, 30);
    CHECK(fit.shift == 29);
    CHECK(std::abs(fit.base - b0) <= 0.05);
  }
}

TEST_CASE("fit_log_base: degenerate and invalid samples") {
  const std::vector<double> flat(100, 0.5);
  const auto a = fit_log_base(flat, 10);
  const auto b = fit_log_base(flat, 10);
  CHECK(a == b);
  CHECK(a.shift == 9);
  CHECK(a.base > 1.0);
  CHECK_NOTHROW(fit_log_base(std::vector<double>{0.1, 0.9, 0.5}, 2));
  CHECK_THROWS_AS(fit_log_base(std::vector<double>{0.5}, 2), InsufficientSample);
  CHECK_THROWS_AS(fit_log_base(std::vector<double>{0.5, 1.5}, 2), DomainError);
  CHECK_THROWS_AS(fit_log_base(flat, 1), ConfigError);
}

TEST_CASE("filters") {
  const FilterConfig cfg;
  io::SpectrumRecord r;
  r.smiles = "CCO";
  for (int k = 1; k <= 300; ++k) r.peaks.push_back({static_cast<double>(k), 1.0});
  CHECK(apply_filters(r, cfg).keep);
  r.peaks.push_back({301.0, 1.0});
  auto res = apply_filters(r, cfg);
  CHECK_FALSE(res.keep);
  CHECK(res.reason == RejectReason::too_many_peaks);
  CHECK(reason_name(res.reason) == "too_many_peaks");

  r.peaks = {{10, 1}, {500, 0.5}};
  CHECK(apply_filters(r, cfg).keep);
  r.peaks.back().mz = 500.4;
  CHECK(apply_filters(r, cfg).reason == RejectReason::mz_exceeds_limit);

  r.peaks = {{10, 1}};
  r.smiles = std::string(100, 'C');
  CHECK(apply_filters(r, cfg).keep);
  r.smiles = std::string(101, 'C');
  CHECK(apply_filters(r, cfg).reason == RejectReason::smiles_too_long);
  r.smiles = "C1CC";
  CHECK(apply_filters(r, cfg).reason == RejectReason::unparseable_smiles);
  r.smiles.reset();
  CHECK(apply_filters(r, cfg).reason == RejectReason::unparseable_smiles);

  // Checks run in the documented order.
  r.smiles = std::string(101, 'C');
  r.peaks = {{600, 1}};
  CHECK(apply_filters(r, cfg).reason == RejectReason::mz_exceeds_limit);
}

TEST_CASE("encode_model_input") {
  io::SpectrumRecord r;
  r.peaks = {{50, 1.0}};
  const BinningConfig cfg;
  auto e = encode_model_input(r, cfg);
  CHECK(e.mz_ids == std::vector<int>{50});
  CHECK(e.intensity_bin_ids == std::vector<int>{29});

  r.peaks = {{41, 0.5}, {50, 1.0}};
  e = encode_model_input(r, cfg);
  CHECK(e.mz_ids == std::vector<int>{41, 50});
  CHECK(e.intensity_bin_ids == std::vector<int>{26, 29});

  r.peaks = {{41.5, 1.0}};
  CHECK_THROWS_AS(encode_model_input(r, cfg), DomainError);
  r.peaks = {{50, 1.0}, {41, 0.5}};
  CHECK_THROWS_AS(encode_model_input(r, cfg), DomainError);
}

TEST_CASE("encode: fuzz over filter-passing spectra") {
  testing::Rng rng(8);
  const FilterConfig filters;
  const BinningConfig cfg;
  int kept = 0;
  for (int t = 0; t < 2000; ++t) {
    io::SpectrumRecord r;
    r.smiles = testing::smiles_pool()[testing::pick(rng, 50)];
    const auto n = 1 + testing::pick(rng, 400);
    for (std::size_t k = 0; k < n; ++k)
      r.peaks.push_back({testing::uniform(rng) * 520.0, testing::uniform(rng) * 1000.0 + 1e-6});
    r = prepare(std::move(r));
    if (!apply_filters(r, filters).keep) continue;
    ++kept;
    const auto e = encode_model_input(r, cfg);
    REQUIRE(e.mz_ids.size() == e.intensity_bin_ids.size());
    for (std::size_t k = 0; k < e.mz_ids.size(); ++k) {
      CHECK(e.mz_ids[k] <= 500);
      CHECK(e.intensity_bin_ids[k] >= 0);
      CHECK(e.intensity_bin_ids[k] < 30);
    }
  }
  CHECK(kept > 100);
}

TEST_CASE("prepare is idempotent") {
  io::SpectrumRecord r;
  r.peaks = {{77.6, 3}, {77.4, 1}, {120.2, 8}};
  const auto once = prepare(r);
  CHECK(prepare(once) == once);
  CHECK(once.peaks == std::vector<Peak>{{77, 0.125}, {78, 0.375}, {120, 1.0}});
}
