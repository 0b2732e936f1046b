#include "specid/fragmenter.hpp"

#include <map>

#include "specid/chem.hpp"
#include "specid/smiles.hpp"

namespace specid::chem {

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double hashed_intensity(std::string_view fragment, std::string_view parent, double low) {
  std::uint64_t h = fnv1a(parent, fnv1a(fragment));
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return low + (1.0 - low) * u;
}

// Atoms reachable from `start` without crossing `cut`.
std::vector<int> side_of(const MolecularGraph& g, int start, int cut) {
  std::vector<char> seen(g.atom_count(), 0);
  std::vector<int> stack{start};
  std::vector<int> out;
  seen[static_cast<std::size_t>(start)] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    out.push_back(u);
    for (const auto& nb : g.neighbors(u)) {
      if (nb.bond == cut || seen[static_cast<std::size_t>(nb.atom)]) continue;
      seen[static_cast<std::size_t>(nb.atom)] = 1;
      stack.push_back(nb.atom);
    }
  }
  return out;
}

MolecularGraph subgraph(const MolecularGraph& g, const std::vector<int>& atoms) {
  std::vector<int> map(g.atom_count(), -1);
  MolecularGraph sub;
  for (int a : atoms) map[static_cast<std::size_t>(a)] = sub.add_atom(g.atom(a));
  for (const auto& b : g.bonds()) {
    const int x = map[static_cast<std::size_t>(b.a)];
    const int y = map[static_cast<std::size_t>(b.b)];
    if (x >= 0 && y >= 0) sub.add_bond(x, y, b.order);
  }
  return sub;
}

}  // namespace

std::vector<io::Peak> stub_fragment(const MolecularGraph& input, const FragmenterOptions& options) {
  MolecularGraph g = input;
  g.clear_stereo();
  const std::string parent = canonical_smiles(g);
  const int m = nominal_mass(g);
  std::map<int, double> peaks;
  peaks[m] += hashed_intensity("M", parent, options.min_intensity);
  if (options.m_minus_one && m > 1) peaks[m - 1] += hashed_intensity("M-1", parent, options.min_intensity);

  const auto in_ring = ring_bonds(g);
  for (std::size_t b = 0; b < g.bond_count(); ++b) {
    if (in_ring[b]) continue;
    const auto& bond = g.bond(static_cast<int>(b));
    for (int end : {bond.a, bond.b}) {
      const auto piece = subgraph(g, side_of(g, end, static_cast<int>(b)));
      const int pm = nominal_mass(piece);
      if (pm < 1) continue;
      peaks[pm] += hashed_intensity(canonical_smiles(piece), parent, options.min_intensity);
    }
  }
  double top = 0.0;
  for (const auto& [mz, in] : peaks) top = std::max(top, in);
  std::vector<io::Peak> out;
  out.reserve(peaks.size());
  for (const auto& [mz, in] : peaks) out.push_back({static_cast<double>(mz), in == top ? 1.0 : in / top});
  return out;
}

io::SpectrumRecord synthesize_record(std::string_view smiles, std::string name,
                                     const FragmenterOptions& options) {
  const auto g = parse_smiles(smiles);
  io::SpectrumRecord r;
  r.name = std::move(name);
  r.smiles = canonical_smiles(g);
  r.nominal_mass = nominal_mass(g);
  r.formula = molecular_formula(g);
  r.source = io::Source::other("stub");
  r.peaks = stub_fragment(g, options);
  return r;
}

}  // namespace specid::chem
