#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "specid/spectra_io.hpp"

namespace specid::curate {

/// Stereo-stripped canonical SMILES.
using CompoundKey = std::string;

/// Throws SmilesSyntaxError / ValenceError from the parser.
CompoundKey compound_key(std::string_view smiles);

/// Key per record; throws UnparseableSmiles(record index), also for records
/// without SMILES.
std::vector<CompoundKey> compound_keys(std::span<const io::SpectrumRecord> records,
                                       unsigned threads = 1);

struct SplitSpec {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
  std::uint64_t seed = 42;

  static SplitSpec experimental(std::uint64_t seed = 42) { return {0.8, 0.1, 0.1, seed}; }
  static SplitSpec synthetic(std::uint64_t seed = 42) { return {0.9, 0.05, 0.05, seed}; }

  /// Throws ConfigError unless every ratio is in (0, 1) and they sum to 1
  /// within 1e-9.
  void validate() const;
};

enum class Part { train = 0, validation = 1, test = 2 };
std::string_view part_name(Part p);

/// Uniform integer in [0, bound) by rejection; identical on every platform,
/// unlike std::uniform_int_distribution.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound);

/// Fisher-Yates shuffle driven by `bounded`.
template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

struct GroupAssignment {
  /// Sorted keys per part.
  std::vector<CompoundKey> keys[3];

  Part part_of(const CompoundKey& key) const;
};

/// Sorts the distinct keys, shuffles them with the seed, then takes
/// floor(n * ratio + 1e-9) groups for validation and for test; the rest go
/// to train.
GroupAssignment assign_groups(std::span<const CompoundKey> keys, const SplitSpec& spec);

struct SplitResult {
  std::vector<io::SpectrumRecord> parts[3];
  GroupAssignment groups;

  const std::vector<io::SpectrumRecord>& train() const { return parts[0]; }
  const std::vector<io::SpectrumRecord>& validation() const { return parts[1]; }
  const std::vector<io::SpectrumRecord>& test() const { return parts[2]; }
};

/// Whole compound groups go to one part; records keep their input order
/// within a part.
SplitResult split(std::span<const io::SpectrumRecord> records, const SplitSpec& spec,
                  unsigned threads = 1);

enum class RemovalReason { overlap, deuterated };
std::string_view reason_name(RemovalReason r);

struct Removed {
  io::SpectrumRecord record;
  RemovalReason reason;
};

struct FilterOutcome {
  std::vector<io::SpectrumRecord> kept;
  std::vector<Removed> removed;
};

/// Drops target records whose compound appears in the reference.
FilterOutcome remove_overlap(std::span<const io::SpectrumRecord> target,
                             std::span<const io::SpectrumRecord> reference);
FilterOutcome remove_overlap(std::span<const io::SpectrumRecord> target,
                             const std::set<CompoundKey>& reference);

/// Drops records whose structure has a hydrogen with mass number 2.
FilterOutcome remove_deuterated(std::span<const io::SpectrumRecord> records);

/// Distinct compound keys of a SMILES list in first-seen order. Strings that
/// fail to parse are skipped and counted in `*invalid` when given.
std::vector<CompoundKey> unique_compounds(std::span<const std::string> smiles,
                                          std::size_t* invalid = nullptr);

/// train.txt, validation.txt, test.txt with one key per line.
void write_manifests(const GroupAssignment& groups, const std::filesystem::path& dir);

}  // namespace specid::curate
