#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace specid::chem {

enum class BondOrder : std::uint8_t { single, double_, triple, quadruple, aromatic };

struct Atom {
  std::string element;  ///< "C", "Cl", "H", ...
  int charge = 0;
  /// Attached hydrogens not present as graph nodes (implicit or bracket H).
  int hydrogens = 0;
  bool aromatic = false;
  std::optional<int> isotope;

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::single;

  int other(int atom) const noexcept { return atom == a ? b : a; }
};

enum class Chirality : std::uint8_t { anticlockwise, clockwise };  // @, @@

/// Tetrahedral centre as written: looking from neighbors[0], the rest are
/// arranged anticlockwise (@) or clockwise (@@). -1 stands for the attached
/// hydrogen.
struct TetrahedralStereo {
  int atom = 0;
  std::vector<int> neighbors;
  Chirality chirality = Chirality::anticlockwise;
};

/// Configuration of the double bond begin=end: begin_ref (a neighbor of
/// begin) and end_ref (a neighbor of end) are cis or trans.
struct DoubleBondStereo {
  int begin = 0;
  int end = 0;
  int begin_ref = 0;
  int end_ref = 0;
  bool cis = false;
};

struct Neighbor {
  int atom;
  int bond;
};

/// Undirected molecular graph with hydrogens folded into atom counts.
class MolecularGraph {
 public:
  int add_atom(Atom atom);
  /// Throws std::invalid_argument on bad endpoints, self-bonds or duplicates.
  int add_bond(int a, int b, BondOrder order);

  std::size_t atom_count() const noexcept { return atoms_.size(); }
  std::size_t bond_count() const noexcept { return bonds_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  const Atom& atom(int i) const { return atoms_[static_cast<std::size_t>(i)]; }
  Atom& atom(int i) { return atoms_[static_cast<std::size_t>(i)]; }
  const Bond& bond(int i) const { return bonds_[static_cast<std::size_t>(i)]; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::span<const Bond> bonds() const noexcept { return bonds_; }
  std::span<const Neighbor> neighbors(int i) const {
    return adjacency_[static_cast<std::size_t>(i)];
  }
  int degree(int i) const {
    return static_cast<int>(adjacency_[static_cast<std::size_t>(i)].size());
  }
  std::optional<int> bond_between(int a, int b) const;

  std::vector<TetrahedralStereo>& tetrahedral() noexcept { return tetrahedral_; }
  const std::vector<TetrahedralStereo>& tetrahedral() const noexcept { return tetrahedral_; }
  std::vector<DoubleBondStereo>& double_bond_stereo() noexcept { return double_bonds_; }
  const std::vector<DoubleBondStereo>& double_bond_stereo() const noexcept {
    return double_bonds_;
  }
  bool has_stereo() const noexcept { return !tetrahedral_.empty() || !double_bonds_.empty(); }
  void clear_stereo() noexcept {
    tetrahedral_.clear();
    double_bonds_.clear();
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<TetrahedralStereo> tetrahedral_;
  std::vector<DoubleBondStereo> double_bonds_;
};

/// Graph with atom i moved to position new_index[i]. The bond list is
/// reordered by `bond_order` when given (bond_order[k] is the old index of
/// the k-th new bond). Stereo descriptors follow the atoms.
MolecularGraph permute_atoms(const MolecularGraph& g, std::span<const int> new_index,
                             std::span<const int> bond_order = {});

/// Both graphs side by side; b's atoms are offset by a.atom_count().
MolecularGraph disjoint_union(const MolecularGraph& a, const MolecularGraph& b);

/// true for bonds that lie on at least one cycle.
std::vector<bool> ring_bonds(const MolecularGraph& g);
/// true for atoms incident to a ring bond.
std::vector<bool> ring_atoms(const MolecularGraph& g);

/// Connected component label per atom, labels dense from 0 in atom order.
std::vector<int> connected_components(const MolecularGraph& g);

/// Atomic number for an element symbol ("Cl" -> 17), 0 if unknown.
int atomic_number(std::string_view symbol);

/// True when some hydrogen node carries mass number 2 ([2H] or [D]). Folded
/// hydrogen counts are always protium.
bool has_deuterium(const MolecularGraph& g);

}  // namespace specid::chem
