#include "specid/curate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "specid/error.hpp"
#include "specid/parallel.hpp"
#include "specid/smiles.hpp"

namespace specid::curate {

CompoundKey compound_key(std::string_view smiles) { return chem::canonicalize(smiles, true); }

std::vector<CompoundKey> compound_keys(std::span<const io::SpectrumRecord> records, unsigned threads) {
  std::vector<CompoundKey> keys(records.size());
  parallel_for(records.size(), threads, [&](std::size_t i) {
    const auto& r = records[i];
    if (!r.smiles) throw UnparseableSmiles(i, "", "record has no SMILES");
    try {
      keys[i] = compound_key(*r.smiles);
    } catch (const Error& e) {
      throw UnparseableSmiles(i, *r.smiles, e.what());
    }
  });
  return keys;
}

void SplitSpec::validate() const {
  for (double r : {train, validation, test})
    if (!(r > 0.0 && r < 1.0)) throw ConfigError("split ratios must lie in (0, 1)");
  if (std::fabs(train + validation + test - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
}

std::string_view part_name(Part p) {
  switch (p) {
    case Part::train: return "train";
    case Part::validation: return "validation";
    case Part::test: return "test";
  }
  return "?";
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

Part GroupAssignment::part_of(const CompoundKey& key) const {
  for (int p = 0; p < 3; ++p)
    if (std::binary_search(keys[p].begin(), keys[p].end(), key)) return static_cast<Part>(p);
  throw std::out_of_range("compound key not assigned: " + key);
}

GroupAssignment assign_groups(std::span<const CompoundKey> keys, const SplitSpec& spec) {
  spec.validate();
  std::vector<CompoundKey> groups(keys.begin(), keys.end());
  std::sort(groups.begin(), groups.end());
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
  std::mt19937_64 rng(spec.seed);
  shuffle(groups, rng);

  const double n = static_cast<double>(groups.size());
  const auto n_val = static_cast<std::size_t>(std::floor(n * spec.validation + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(n * spec.test + 1e-9));
  const std::size_t n_train = groups.size() - n_val - n_test;

  GroupAssignment a;
  a.keys[0].assign(groups.begin(), groups.begin() + static_cast<std::ptrdiff_t>(n_train));
  a.keys[1].assign(groups.begin() + static_cast<std::ptrdiff_t>(n_train),
                   groups.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  a.keys[2].assign(groups.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), groups.end());
  for (auto& k : a.keys) std::sort(k.begin(), k.end());
  return a;
}

SplitResult split(std::span<const io::SpectrumRecord> records, const SplitSpec& spec, unsigned threads) {
  spec.validate();
  const auto keys = compound_keys(records, threads);
  SplitResult out;
  out.groups = assign_groups(keys, spec);
  for (std::size_t i = 0; i < records.size(); ++i)
    out.parts[static_cast<int>(out.groups.part_of(keys[i]))].push_back(records[i]);
  return out;
}

std::string_view reason_name(RemovalReason r) {
  switch (r) {
    case RemovalReason::overlap: return "overlap";
    case RemovalReason::deuterated: return "deuterated";
  }
  return "?";
}

FilterOutcome remove_overlap(std::span<const io::SpectrumRecord> target,
                             const std::set<CompoundKey>& reference) {
  const auto keys = compound_keys(target);
  FilterOutcome out;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (reference.count(keys[i])) out.removed.push_back({target[i], RemovalReason::overlap});
    else out.kept.push_back(target[i]);
  }
  return out;
}

FilterOutcome remove_overlap(std::span<const io::SpectrumRecord> target,
                             std::span<const io::SpectrumRecord> reference) {
  const auto ref = compound_keys(reference);
  return remove_overlap(target, std::set<CompoundKey>(ref.begin(), ref.end()));
}

FilterOutcome remove_deuterated(std::span<const io::SpectrumRecord> records) {
  FilterOutcome out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.smiles) throw UnparseableSmiles(i, "", "record has no SMILES");
    bool deuterated = false;
    try {
      deuterated = chem::has_deuterium(chem::parse_smiles(*r.smiles));
    } catch (const Error& e) {
      throw UnparseableSmiles(i, *r.smiles, e.what());
    }
    if (deuterated) out.removed.push_back({r, RemovalReason::deuterated});
    else out.kept.push_back(r);
  }
  return out;
}

std::vector<CompoundKey> unique_compounds(std::span<const std::string> smiles, std::size_t* invalid) {
  std::vector<CompoundKey> out;
  std::unordered_set<CompoundKey> seen;
  std::size_t bad = 0;
  for (const auto& s : smiles) {
    CompoundKey k;
    try {
      k = compound_key(s);
    } catch (const Error&) {
      ++bad;
      continue;
    }
    if (seen.insert(k).second) out.push_back(std::move(k));
  }
  if (invalid) *invalid = bad;
  return out;
}

void write_manifests(const GroupAssignment& groups, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (int p = 0; p < 3; ++p) {
    const auto path = dir / (std::string(part_name(static_cast<Part>(p))) + ".txt");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& k : groups.keys[p]) out << k << '\n';
  }
}

}  // namespace specid::curate
