#pragma once

#include <optional>
#include <string_view>

#include "specid/molecule.hpp"

namespace specid::chem::detail {

/// Member of the SMILES organic subset (B C N O P S F Cl Br I, aromatic
/// b c n o p s).
bool is_organic(std::string_view element, bool aromatic);

/// Hydrogens an organic-subset atom gets from the default valences given its
/// current bonds; nullopt when no allowed valence fits.
std::optional<int> implicit_hydrogens(const MolecularGraph& g, int atom);

int bond_valence(BondOrder order);

std::string_view bundled_mass_table();

}  // namespace specid::chem::detail
