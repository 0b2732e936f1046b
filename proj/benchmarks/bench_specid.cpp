// Throughput of the hot paths: library search, canonicalization,
// fingerprints, BPE training/encoding and intensity binning.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "specid/chem.hpp"
#include "specid/fingerprint.hpp"
#include "specid/fragmenter.hpp"
#include "specid/preprocess.hpp"
#include "specid/search.hpp"
#include "specid/smiles.hpp"
#include "specid/tokenizer.hpp"

using namespace specid;

namespace {

const std::vector<std::string>& seeds() {
  static const std::vector<std::string> s = {
      "CCO", "CC(=O)O", "c1ccccc1", "Cc1ccccc1O", "CCN(CC)CC", "OC(=O)c1ccccc1", "CC(C)CC(=O)OC",
      "c1ccc2ccccc2c1", "CCOC(=O)C=C", "c1cc(Cl)ccc1Cl", "CC(C)(C)O", "NCCc1ccc(O)c(O)c1", "C1CCCCC1",
      "CCCCCCCC(=O)O", "COc1ccc(C=O)cc1", "C1CCC(=O)C1", "CSC", "C#CCO", "c1ccncc1", "CC(=O)Nc1ccc(O)cc1"};
  return s;
}

// Grows the seed set by mechanical substitution so libraries are larger
// than the seed list without needing a molecule generator here.
std::vector<std::string> smiles_corpus(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; out.size() < n; ++i) {
    const auto& s = seeds()[i % seeds().size()];
    out.push_back(std::string(1 + (i / seeds().size()) % 8, 'C') + s);
  }
  return out;
}

search::SpectralLibrary library(std::size_t n) {
  std::vector<io::SpectrumRecord> recs;
  const auto smi = smiles_corpus(n);
  for (std::size_t i = 0; i < n; ++i) recs.push_back(chem::synthesize_record(smi[i], "b" + std::to_string(i)));
  return search::build_index(recs);
}

void BM_Sss(benchmark::State& state) {
  const auto lib = library(static_cast<std::size_t>(state.range(0)));
  const auto q = chem::synthesize_record("CCc1ccc(O)cc1", "q");
  for (auto _ : state) benchmark::DoNotOptimize(search::sss(q.peaks, lib, 10));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sss)->Arg(1000)->Arg(10000);

void BM_Hss(benchmark::State& state) {
  const auto lib = library(static_cast<std::size_t>(state.range(0)));
  const auto q = chem::synthesize_record("CCc1ccc(O)cc1", "q");
  for (auto _ : state) benchmark::DoNotOptimize(search::hss(q.peaks, q.nominal_mass, lib, 10));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Hss)->Arg(1000)->Arg(10000);

void BM_Bdc(benchmark::State& state) {
  const auto lib = library(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(search::bdc("CCc1ccc(O)cc1", lib, 10));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Bdc)->Arg(1000)->Arg(10000);

void BM_Canonicalize(benchmark::State& state) {
  const auto smi = smiles_corpus(200);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(chem::canonicalize(smi[i++ % smi.size()]));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Canonicalize);

void BM_Fingerprint(benchmark::State& state) {
  std::vector<chem::MolecularGraph> mols;
  for (const auto& s : smiles_corpus(200)) mols.push_back(chem::parse_smiles(s));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(chem::morgan_fingerprint(mols[i++ % mols.size()]));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Fingerprint);

void BM_TrainBpe(benchmark::State& state) {
  const auto corpus = smiles_corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tok::train_bpe(corpus, 10));
}
BENCHMARK(BM_TrainBpe)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_Encode(benchmark::State& state) {
  const auto corpus = smiles_corpus(5000);
  const auto t = tok::train_bpe(corpus, 10);
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(tok::encode(corpus[i++ % corpus.size()], t.vocab, t.model, io::Source::nist()));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Encode);

void BM_BinIntensity(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1e-9, 1.0);
  std::vector<double> x(4096);
  for (auto& v : x) v = u(rng);
  const preprocess::BinningConfig cfg{1.28, 29};
  for (auto _ : state)
    for (double v : x) benchmark::DoNotOptimize(preprocess::bin_intensity(v, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_BinIntensity);

}  // namespace

BENCHMARK_MAIN();
