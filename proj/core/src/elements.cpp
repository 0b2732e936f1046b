#include <array>
#include <string_view>

#include "chem_detail.hpp"
#include "specid/molecule.hpp"

namespace specid::chem {

namespace {

constexpr std::array<std::string_view, 118> kSymbols = {
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si", "P",
    "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn",
    "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh",
    "Pd", "Ag", "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W",  "Re",
    "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th",
    "Pa", "U",  "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db",
    "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

}  // namespace

int atomic_number(std::string_view symbol) {
  for (std::size_t i = 0; i < kSymbols.size(); ++i)
    if (kSymbols[i] == symbol) return static_cast<int>(i) + 1;
  return 0;
}

namespace detail {

bool is_organic(std::string_view el, bool aromatic) {
  if (aromatic)
    return el == "B" || el == "C" || el == "N" || el == "O" || el == "P" || el == "S";
  return el == "B" || el == "C" || el == "N" || el == "O" || el == "P" || el == "S" ||
         el == "F" || el == "Cl" || el == "Br" || el == "I";
}

int bond_valence(BondOrder order) {
  switch (order) {
    case BondOrder::single: return 1;
    case BondOrder::double_: return 2;
    case BondOrder::triple: return 3;
    case BondOrder::quadruple: return 4;
    case BondOrder::aromatic: return 1;
  }
  return 1;
}

std::optional<int> implicit_hydrogens(const MolecularGraph& g, int atom) {
  const Atom& a = g.atom(atom);
  std::array<int, 3> valences{};
  std::size_t nv = 0;
  const auto& el = a.element;
  if (el == "B") valences = {3}, nv = 1;
  else if (el == "C") valences = {4}, nv = 1;
  else if (el == "N" || el == "P") valences = {3, 5}, nv = 2;
  else if (el == "O") valences = {2}, nv = 1;
  else if (el == "S") valences = {2, 4, 6}, nv = 3;
  else if (el == "F" || el == "Cl" || el == "Br" || el == "I") valences = {1}, nv = 1;
  else return std::nullopt;

  int sum = 0;
  for (const auto& nb : g.neighbors(atom)) sum += bond_valence(g.bond(nb.bond).order);

  for (std::size_t i = 0; i < nv; ++i) {
    if (valences[i] < sum) continue;
    int h = valences[i] - sum;
    // An aromatic atom that can take a ring double bond spends one valence
    // unit on it.
    if (a.aromatic && (el == "B" || el == "C" || el == "N" || el == "P")) h = h > 0 ? h - 1 : 0;
    return h;
  }
  return std::nullopt;
}

}  // namespace detail
}  // namespace specid::chem
