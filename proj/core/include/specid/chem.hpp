#pragma once

#include <map>
#include <string>
#include <string_view>

#include "specid/formula.hpp"
#include "specid/molecule.hpp"

namespace specid::chem {

/// Element counts including folded hydrogens. Isotope labels are ignored
/// ([2H] counts as H).
Formula molecular_formula(const MolecularGraph& g);

/// Sum of nominal masses. An atom with an isotope label contributes its mass
/// number; otherwise the bundled most-abundant-isotope table is used.
/// Throws UnknownElement for elements missing from the table.
int nominal_mass(const MolecularGraph& g);

/// Nominal mass of a formula from the bundled table.
int nominal_mass(const Formula& formula);

/// Bundled element -> nominal mass table.
const std::map<std::string, int, std::less<>>& nominal_mass_table();

}  // namespace specid::chem
