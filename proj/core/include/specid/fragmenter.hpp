#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "specid/molecule.hpp"
#include "specid/spectra_io.hpp"

namespace specid::chem {

/// Deterministic stand-in for an EI fragmenter, used to build the bundled
/// test corpus. It is not a physical model.
///
/// Peaks: the molecular ion M, M-1, and both pieces of every single
/// cleavage of an acyclic bond (piece mass = its atoms plus their hydrogens).
/// Each peak's intensity is derived from a hash of the fragment's canonical
/// SMILES and the parent's canonical SMILES, so isomers get different
/// patterns. Coinciding m/z values are summed; the result is normalized to a
/// maximum of 1 and sorted by m/z.
struct FragmenterOptions {
  double min_intensity = 0.05;  ///< hashed intensities fall in [min, 1]
  bool m_minus_one = true;
};

std::vector<io::Peak> stub_fragment(const MolecularGraph& g, const FragmenterOptions& options = {});

/// Record with name, canonical SMILES, nominal mass, formula and the stub
/// spectrum. Throws whatever parse_smiles throws.
io::SpectrumRecord synthesize_record(std::string_view smiles, std::string name,
                                     const FragmenterOptions& options = {});

}  // namespace specid::chem
