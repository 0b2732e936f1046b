#pragma once

#include <string>
#include <string_view>

#include "specid/molecule.hpp"

namespace specid::chem {

/// Parses a SMILES string: organic subset, bracket atoms (isotope, chirality,
/// H count, charge, atom class), bonds - = # $ : / \, branches, ring closures
/// 0-9 and %nn, and '.' separated components. Implicit hydrogens are resolved
/// from the standard valences; plain [H] atoms are folded into their
/// neighbor's hydrogen count. Tetrahedral (@, @@) and double-bond (/, \)
/// stereo is kept on the graph; other chirality classes are parsed and dropped.
///
/// Throws SmilesSyntaxError (with character offset) or ValenceError.
MolecularGraph parse_smiles(std::string_view smiles);

/// Deterministic canonical SMILES. Isomorphic graphs give byte-identical
/// strings. With strip_stereo the output carries no stereo marks.
///
/// Ranking is Morgan-style invariant refinement; remaining ties are broken by
/// exploring individualizations and keeping the lexicographically smallest
/// string. This is internally consistent but does not try to match any other
/// toolkit's canonical form.
std::string canonical_smiles(const MolecularGraph& g, bool strip_stereo = true);

/// parse_smiles + canonical_smiles.
std::string canonicalize(std::string_view smiles, bool strip_stereo = true);

/// Non-canonical SMILES following atom index order; mostly for diagnostics.
std::string to_smiles(const MolecularGraph& g, bool with_stereo = true);

}  // namespace specid::chem
