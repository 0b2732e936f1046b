#include <algorithm>
#include <bit>
#include <string>
#include <utility>

#include "specid/error.hpp"
#include "specid/fingerprint.hpp"

namespace specid::chem {

Fingerprint::Fingerprint(std::size_t width, int radius) : width_(width), radius_(radius) {
  if (width < 64 || !std::has_single_bit(width))
    throw ConfigError("fingerprint width must be a power of two >= 64, got " + std::to_string(width));
  if (radius < 0) throw ConfigError("fingerprint radius must be non-negative");
  words_.assign(width / 64, 0);
}

std::size_t Fingerprint::popcount() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

namespace {

// splitmix64 finalizer; stable across platforms, unlike std::hash.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t combine(std::uint64_t seed, std::uint64_t v) { return mix(seed ^ mix(v)); }

}  // namespace

Fingerprint morgan_fingerprint(const MolecularGraph& g, int radius, std::size_t width) {
  Fingerprint fp(width, radius);
  const std::size_t n = g.atom_count();
  if (n == 0) return fp;
  const auto in_ring = ring_atoms(g);

  std::vector<std::uint64_t> id(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = g.atom(static_cast<int>(i));
    std::uint64_t h = 0x5eed;
    h = combine(h, static_cast<std::uint64_t>(atomic_number(a.element)));
    h = combine(h, static_cast<std::uint64_t>(g.degree(static_cast<int>(i))));
    h = combine(h, static_cast<std::uint64_t>(a.hydrogens));
    h = combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(a.charge)));
    h = combine(h, a.aromatic ? 1U : 0U);
    h = combine(h, in_ring[i] ? 1U : 0U);
    h = combine(h, static_cast<std::uint64_t>(a.isotope.value_or(0)));
    id[i] = h;
    fp.set(h & (width - 1));
  }

  std::vector<std::uint64_t> next(n);
  std::vector<std::pair<int, std::uint64_t>> env;
  for (int round = 1; round <= radius; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      env.clear();
      for (const auto& nb : g.neighbors(static_cast<int>(i)))
        env.emplace_back(static_cast<int>(g.bond(nb.bond).order), id[static_cast<std::size_t>(nb.atom)]);
      std::sort(env.begin(), env.end());
      std::uint64_t h = combine(static_cast<std::uint64_t>(round), id[i]);
      for (const auto& [order, nid] : env) h = combine(combine(h, static_cast<std::uint64_t>(order)), nid);
      next[i] = h;
      fp.set(h & (width - 1));
    }
    id.swap(next);
  }
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.width() != b.width())
    throw WidthMismatch("fingerprint widths differ: " + std::to_string(a.width()) + " vs " +
                        std::to_string(b.width()));
  std::size_t both = 0;
  std::size_t either = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t k = 0; k < wa.size(); ++k) {
    both += static_cast<std::size_t>(std::popcount(wa[k] & wb[k]));
    either += static_cast<std::size_t>(std::popcount(wa[k] | wb[k]));
  }
  if (either == 0) return 1.0;
  return static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace specid::chem
