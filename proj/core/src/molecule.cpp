#include "specid/molecule.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace specid::chem {

int MolecularGraph::add_atom(Atom atom) {
  atoms_.push_back(std::move(atom));
  adjacency_.emplace_back();
  return static_cast<int>(atoms_.size()) - 1;
}

int MolecularGraph::add_bond(int a, int b, BondOrder order) {
  const int n = static_cast<int>(atoms_.size());
  if (a < 0 || b < 0 || a >= n || b >= n) throw std::invalid_argument("bond endpoint out of range");
  if (a == b) throw std::invalid_argument("self bond");
  if (bond_between(a, b)) throw std::invalid_argument("duplicate bond");
  const int idx = static_cast<int>(bonds_.size());
  bonds_.push_back({a, b, order});
  adjacency_[static_cast<std::size_t>(a)].push_back({b, idx});
  adjacency_[static_cast<std::size_t>(b)].push_back({a, idx});
  return idx;
}

std::optional<int> MolecularGraph::bond_between(int a, int b) const {
  if (a < 0 || static_cast<std::size_t>(a) >= adjacency_.size()) return std::nullopt;
  for (const auto& nb : adjacency_[static_cast<std::size_t>(a)])
    if (nb.atom == b) return nb.bond;
  return std::nullopt;
}

MolecularGraph permute_atoms(const MolecularGraph& g, std::span<const int> new_index,
                             std::span<const int> bond_order) {
  const std::size_t n = g.atom_count();
  if (new_index.size() != n) throw std::invalid_argument("permutation size mismatch");
  std::vector<int> old_of(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const int t = new_index[i];
    if (t < 0 || static_cast<std::size_t>(t) >= n || old_of[static_cast<std::size_t>(t)] != -1)
      throw std::invalid_argument("not a permutation");
    old_of[static_cast<std::size_t>(t)] = static_cast<int>(i);
  }
  MolecularGraph out;
  for (std::size_t t = 0; t < n; ++t) out.add_atom(g.atom(old_of[t]));

  std::vector<int> bonds(g.bond_count());
  if (bond_order.empty()) {
    std::iota(bonds.begin(), bonds.end(), 0);
  } else {
    if (bond_order.size() != g.bond_count()) throw std::invalid_argument("bond order size mismatch");
    bonds.assign(bond_order.begin(), bond_order.end());
  }
  auto map = [&](int atom) { return atom < 0 ? atom : new_index[static_cast<std::size_t>(atom)]; };
  for (int b : bonds) {
    const auto& bd = g.bond(b);
    out.add_bond(map(bd.a), map(bd.b), bd.order);
  }
  for (const auto& t : g.tetrahedral()) {
    TetrahedralStereo s{map(t.atom), {}, t.chirality};
    for (int nb : t.neighbors) s.neighbors.push_back(map(nb));
    out.tetrahedral().push_back(std::move(s));
  }
  for (const auto& d : g.double_bond_stereo())
    out.double_bond_stereo().push_back(
        {map(d.begin), map(d.end), map(d.begin_ref), map(d.end_ref), d.cis});
  return out;
}

MolecularGraph disjoint_union(const MolecularGraph& a, const MolecularGraph& b) {
  MolecularGraph out = a;
  const int offset = static_cast<int>(a.atom_count());
  for (const auto& atom : b.atoms()) out.add_atom(atom);
  for (const auto& bond : b.bonds()) out.add_bond(bond.a + offset, bond.b + offset, bond.order);
  auto shift = [&](int x) { return x < 0 ? x : x + offset; };
  for (const auto& t : b.tetrahedral()) {
    TetrahedralStereo s{shift(t.atom), {}, t.chirality};
    for (int nb : t.neighbors) s.neighbors.push_back(shift(nb));
    out.tetrahedral().push_back(std::move(s));
  }
  for (const auto& d : b.double_bond_stereo())
    out.double_bond_stereo().push_back(
        {shift(d.begin), shift(d.end), shift(d.begin_ref), shift(d.end_ref), d.cis});
  return out;
}

std::vector<bool> ring_bonds(const MolecularGraph& g) {
  // Bridges via iterative low-link DFS; every non-bridge lies on a cycle.
  const int n = static_cast<int>(g.atom_count());
  std::vector<bool> in_ring(g.bond_count(), true);
  std::vector<int> disc(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  int timer = 0;
  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (int root = 0; root < n; ++root) {
    if (disc[static_cast<std::size_t>(root)] != -1) continue;
    stack.push_back({root, -1, 0});
    disc[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = timer++;
    while (!stack.empty()) {
      auto& f = stack.back();
      const auto nbs = g.neighbors(f.atom);
      if (f.next < nbs.size()) {
        const auto nb = nbs[f.next++];
        if (nb.bond == f.parent_bond) continue;
        auto& dv = disc[static_cast<std::size_t>(nb.atom)];
        if (dv == -1) {
          dv = low[static_cast<std::size_t>(nb.atom)] = timer++;
          stack.push_back({nb.atom, nb.bond, 0});
        } else {
          auto& lu = low[static_cast<std::size_t>(f.atom)];
          lu = std::min(lu, dv);
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          const int parent = stack.back().atom;
          auto& lp = low[static_cast<std::size_t>(parent)];
          lp = std::min(lp, low[static_cast<std::size_t>(done.atom)]);
          if (low[static_cast<std::size_t>(done.atom)] > disc[static_cast<std::size_t>(parent)])
            in_ring[static_cast<std::size_t>(done.parent_bond)] = false;
        }
      }
    }
  }
  return in_ring;
}

std::vector<bool> ring_atoms(const MolecularGraph& g) {
  const auto rb = ring_bonds(g);
  std::vector<bool> out(g.atom_count(), false);
  for (std::size_t b = 0; b < rb.size(); ++b) {
    if (!rb[b]) continue;
    out[static_cast<std::size_t>(g.bond(static_cast<int>(b)).a)] = true;
    out[static_cast<std::size_t>(g.bond(static_cast<int>(b)).b)] = true;
  }
  return out;
}

std::vector<int> connected_components(const MolecularGraph& g) {
  std::vector<int> label(g.atom_count(), -1);
  int next = 0;
  std::vector<int> stack;
  for (int s = 0; s < static_cast<int>(g.atom_count()); ++s) {
    if (label[static_cast<std::size_t>(s)] != -1) continue;
    label[static_cast<std::size_t>(s)] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(u)) {
        if (label[static_cast<std::size_t>(nb.atom)] == -1) {
          label[static_cast<std::size_t>(nb.atom)] = next;
          stack.push_back(nb.atom);
        }
      }
    }
    ++next;
  }
  return label;
}

bool has_deuterium(const MolecularGraph& g) {
  return std::any_of(g.atoms().begin(), g.atoms().end(), [](const Atom& a) {
    return a.element == "H" && a.isotope && *a.isotope == 2;
  });
}

}  // namespace specid::chem
