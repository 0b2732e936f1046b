#include <doctest.h>

#include <sstream>

#include "specid/chem.hpp"
#include "specid/error.hpp"
#include "specid/search.hpp"
#include "specid/smiles.hpp"
#include "support/generators.hpp"
#include "support/search_oracle.hpp"
#include "support/temp_dir.hpp"

using namespace specid;
using namespace specid::search;
using io::Peak;
using io::SpectrumRecord;

namespace {

std::vector<Peak> random_peaks(testing::Rng& rng, std::size_t n, int max_mz) {
  std::vector<Peak> p;
  for (std::size_t k = 0; k < n; ++k)
    p.push_back({static_cast<double>(1 + testing::pick(rng, static_cast<std::size_t>(max_mz))),
                 0.01 + testing::uniform(rng)});
  std::sort(p.begin(), p.end(), [](const Peak& a, const Peak& b) { return a.mz < b.mz; });
  return p;
}

std::vector<SpectrumRecord> toy_records(testing::Rng& rng, std::size_t n, std::size_t peaks, int max_mz) {
  std::vector<SpectrumRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    SpectrumRecord r;
    r.name = "e" + std::to_string(i);
    r.smiles = testing::smiles_pool()[testing::pick(rng, 50)];
    r.nominal_mass = 20 + static_cast<int>(testing::pick(rng, 60));
    r.peaks = random_peaks(rng, 1 + testing::pick(rng, peaks), max_mz);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

TEST_CASE("weigh") {
  const auto w = weigh(std::vector<Peak>{{10.4, 4}, {9.6, 0}, {20, 1}}, {0.5, 1.0});
  REQUIRE(w.size() == 2);
  const double a = 2.0 * 10;
  const double b = 1.0 * 20;
  CHECK(w[0].mz == 10);
  CHECK(w[0].w == doctest::Approx(a / std::hypot(a, b)).epsilon(1e-15));
  CHECK(w[1].w == doctest::Approx(b / std::hypot(a, b)).epsilon(1e-15));
  CHECK(weigh(std::vector<Peak>{{1, 0}}, {}).empty());
  CHECK_THROWS_AS(SimilarityWeights({-0.1, 3}).validate(), ConfigError);
  CHECK_NOTHROW(SimilarityWeights({0.0, 0.0}).validate());
}

TEST_CASE("empty and single-entry libraries") {
  const auto empty = build_index(std::vector<SpectrumRecord>{});
  CHECK(empty.empty());
  const std::vector<Peak> q{{50, 1}};
  CHECK(sss(q, empty, 5).empty());
  CHECK(hss(q, 10, empty, 5).empty());
  CHECK(bdc("CCO", empty, 5).empty());

  SpectrumRecord r;
  r.smiles = "CCO";
  r.peaks = {{31, 1}, {45, 0.4}, {46, 0.2}};
  const auto one = build_index(std::vector{r});
  CHECK(one.entry(0).nominal_mass == 46);
  const auto hit = sss(r.peaks, one, 1);
  REQUIRE(hit.size() == 1);
  CHECK(hit[0].score == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hit[0].smiles == chem::canonicalize("CCO"));
  CHECK_THROWS_AS(sss(std::vector<Peak>{}, one, 1), EmptyQuery);
  CHECK_THROWS_AS(hss(r.peaks, std::nullopt, one, 1), MissingMass);
}

TEST_CASE("build_index errors and masses") {
  SpectrumRecord bad;
  bad.smiles = "C1CC";
  bad.peaks = {{1, 1}};
  SpectrumRecord good;
  good.smiles = "CCO";
  good.peaks = {{1, 1}};
  good.nominal_mass = 47;
  try {
    build_index(std::vector{good, bad});
    FAIL("expected UnparseableSmiles");
  } catch (const UnparseableSmiles& e) {
    CHECK(e.index() == 1);
  }
  CHECK(build_index(std::vector{good}).entry(0).nominal_mass == 47);
}

TEST_CASE("sss: identity, disjoint, oracle ranking") {
  testing::Rng rng(21);
  const auto recs = toy_records(rng, 5, 8, 120);
  const auto lib = build_index(recs);
  const auto top = sss(recs[2].peaks, lib, 5);
  CHECK(top[0].score == doctest::Approx(1.0).epsilon(1e-12));

  const auto none = sss_scores(std::vector<Peak>{{400, 1}, {450, 1}}, lib);
  for (double s : none) CHECK(s == 0.0);

  const auto w = lib.options().weights;
  for (int t = 0; t < 200; ++t) {
    const auto q = random_peaks(rng, 1 + testing::pick(rng, 10), 120);
    const auto scores = sss_scores(q, lib);
    std::vector<double> ref;
    for (const auto& r : recs)
      ref.push_back(testing::reference_cosine(testing::reference_weights(q, w.a, w.c),
                                              testing::reference_weights(r.peaks, w.a, w.c)));
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(scores[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    const auto got = sss(q, lib, 5);
    const auto order = testing::reference_ranking(scores);
    for (std::size_t r = 0; r < got.size(); ++r) CHECK(got[r].index == order[r]);
  }
}

TEST_CASE("top_k bounds and ties") {
  testing::Rng rng(1);
  const auto lib = build_index(toy_records(rng, 6, 4, 50));
  const std::vector<double> scores{0.5, 0.9, 0.5, 0.1, 0.9, 0.0};
  const auto all = top_k(scores, lib, 100);
  REQUIRE(all.size() == 6);
  std::vector<std::size_t> idx;
  for (const auto& c : all) idx.push_back(c.index);
  CHECK(idx == std::vector<std::size_t>{1, 4, 0, 2, 3, 5});
  const auto skipped = top_k(scores, lib, 2, [](std::size_t i) { return i == 1; });
  CHECK(skipped[0].index == 4);
  CHECK(skipped[1].index == 0);
  CHECK(top_k(scores, lib, 0).empty());
}

TEST_CASE("hss reduces to sss at zero mass difference") {
  testing::Rng rng(77);
  for (int t = 0; t < 100; ++t) {
    auto recs = toy_records(rng, 10, 12, 150);
    for (auto& r : recs) r.nominal_mass = 100;
    const auto lib = build_index(recs);
    const auto q = random_peaks(rng, 1 + testing::pick(rng, 12), 150);
    CHECK(hss_scores(q, 100, lib) == sss_scores(q, lib));
    const auto a = hss(q, 100, lib, 5);
    const auto b = sss(q, lib, 5);
    CHECK(a == b);
  }
}

TEST_CASE("hss: shifted copy scores 1") {
  // c = 0 keeps peak weights unchanged under an m/z shift.
  const SimilarityWeights flat{0.6, 0.0};
  SpectrumRecord e;
  e.smiles = "CCCCO";
  e.nominal_mass = 84;
  e.peaks = {{41, 0.3}, {53, 1.0}, {67, 0.5}};
  const std::vector<Peak> q{{31, 0.3}, {43, 1.0}, {57, 0.5}};
  const auto lib = build_index(std::vector{e}, {flat});
  CHECK(hss_scores(q, 74, lib)[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sss_scores(q, lib)[0] == 0.0);
}

TEST_CASE("hss matches the exhaustive assignment oracle") {
  testing::Rng rng(5150);
  const double a = 0.6;
  const double c = 3.0;
  int cases = 0;
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + testing::pick(rng, 20);
    auto recs = toy_records(rng, n, 10, 60);
    const auto lib = build_index(recs, {{a, c}});
    const int qmass = 20 + static_cast<int>(testing::pick(rng, 60));
    auto q = random_peaks(rng, 1 + testing::pick(rng, 10), 60);
    const auto qw = testing::reference_weights(q, a, c);
    REQUIRE(qw.size() <= 10);
    const auto scores = hss_scores(q, qmass, lib);
    for (std::size_t i = 0; i < n; ++i) {
      const double ref = testing::reference_hybrid(qw, testing::reference_weights(recs[i].peaks, a, c),
                                                   *recs[i].nominal_mass - qmass, lib.max_mz());
      CHECK(scores[i] == doctest::Approx(ref).epsilon(1e-12));
      ++cases;
    }
  }
  CHECK(cases > 1000);
}

TEST_CASE("bdc") {
  std::vector<SpectrumRecord> recs;
  for (const auto& s : testing::smiles_pool()) {
    SpectrumRecord r;
    r.smiles = s;
    r.peaks = {{10, 1}};
    recs.push_back(r);
  }
  const auto lib = build_index(recs);
  const auto top = bdc("CC(=O)Nc1ccc(O)cc1", lib, 3);
  CHECK(top[0].score == 1.0);
  CHECK(top[0].smiles == chem::canonicalize("CC(=O)Nc1ccc(O)cc1"));
  CHECK(bdc("C", lib, 1000).size() == lib.size());
  CHECK_THROWS_AS(bdc("C1CC", lib, 1), UnparseableSmiles);

  // Ranking agrees with a direct Tanimoto scan over 20 entries.
  const std::vector<SpectrumRecord> twenty(recs.begin(), recs.begin() + 20);
  const auto small = build_index(twenty);
  for (const auto& query : testing::smiles_pool()) {
    const auto qf = chem::morgan_fingerprint(chem::parse_smiles(query));
    std::vector<double> ref;
    for (const auto& r : twenty) ref.push_back(chem::tanimoto(qf, chem::morgan_fingerprint(chem::parse_smiles(*r.smiles))));
    const auto got = bdc(query, small, 20);
    const auto order = testing::reference_ranking(ref);
    REQUIRE(got.size() == 20);
    for (std::size_t k = 0; k < 20; ++k) {
      CHECK(got[k].index == order[k]);
      CHECK(got[k].score == ref[order[k]]);
    }
  }
}

TEST_CASE("index serialization") {
  testing::Rng rng(9);
  const auto recs = toy_records(rng, 40, 15, 200);
  std::ostringstream a;
  std::ostringstream b;
  save_index(build_index(recs), a);
  save_index(build_index(recs), b);
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  const auto lib = load_index(in);
  const auto orig = build_index(recs);
  REQUIRE(lib.size() == orig.size());
  const auto q = recs[3].peaks;
  CHECK(sss_scores(q, lib) == sss_scores(q, orig));
  CHECK(hss_scores(q, 50, lib) == hss_scores(q, 50, orig));
  CHECK(bdc_scores("CCO", lib) == bdc_scores("CCO", orig));

  testing::TempDir dir;
  save_index(orig, dir / "lib.jsonl");
  CHECK(load_index(dir / "lib.jsonl").size() == 40);

  std::istringstream bad(R"({"format":"other","version":1})" "\n");
  CHECK_THROWS_AS(load_index(bad), FormatError);
  auto text = a.str();
  text = text.substr(0, text.rfind('\n', text.size() - 2) + 1);  // drop the last entry
  std::istringstream short_in(text);
  CHECK_THROWS_AS(load_index(short_in), FormatError);
}

TEST_CASE("with_weights re-weights from stored peaks") {
  testing::Rng rng(3);
  const auto recs = toy_records(rng, 10, 10, 100);
  const SimilarityWeights w{1.0, 0.0};
  const auto direct = build_index(recs, {w});
  const auto swapped = with_weights(build_index(recs), w);
  const auto q = recs[0].peaks;
  CHECK(sss_scores(q, direct) == sss_scores(q, swapped));
}
