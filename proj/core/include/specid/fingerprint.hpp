#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "specid/molecule.hpp"

namespace specid::chem {

/// Fixed-width bit vector. Width is a power of two, at least 64.
class Fingerprint {
 public:
  Fingerprint() = default;
  /// Throws ConfigError unless width is a power of two >= 64.
  Fingerprint(std::size_t width, int radius);

  std::size_t width() const noexcept { return width_; }
  int radius() const noexcept { return radius_; }

  void set(std::size_t bit) { words_[bit >> 6] |= std::uint64_t{1} << (bit & 63); }
  bool test(std::size_t bit) const { return (words_[bit >> 6] >> (bit & 63)) & 1U; }
  std::size_t popcount() const noexcept;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;

 private:
  std::size_t width_ = 0;
  int radius_ = 0;
  std::vector<std::uint64_t> words_;
};

inline constexpr int kDefaultRadius = 2;
inline constexpr std::size_t kDefaultWidth = 2048;

/// ECFP-style circular fingerprint. Atom invariants are (atomic number, heavy
/// degree, H count, charge, aromatic, in ring, isotope); each round hashes an
/// atom's previous identifier with the sorted (bond order, neighbor
/// identifier) list. Every identifier from rounds 0..radius sets bit
/// id % width.
Fingerprint morgan_fingerprint(const MolecularGraph& g, int radius = kDefaultRadius,
                               std::size_t width = kDefaultWidth);

/// |a & b| / |a | b|; 1 when both are empty. Throws WidthMismatch.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

}  // namespace specid::chem
