// Mock libraries with planted duplicates, overlaps and deuterated records.
#pragma once

#include <string>
#include <vector>

#include "specid/curate.hpp"
#include "specid/spectra_io.hpp"
#include "support/generators.hpp"

namespace specid::testing {

/// Distinct acyclic alkyl alcohols and amines: "C...CO", "C...CN", ...
inline std::string distinct_compound(std::size_t i) {
  static const char* tails[] = {"O", "N", "F", "Cl", "Br", "S"};
  return std::string(1 + i / 6, 'C') + tails[i % 6];
}

/// Another spelling of the same compound (atoms written tail first).
inline std::string respelled(std::size_t i) {
  static const char* heads[] = {"O", "N", "F", "Cl", "Br", "S"};
  return std::string(heads[i % 6]) + std::string(1 + i / 6, 'C');
}

inline io::SpectrumRecord record_for(const std::string& smiles, std::size_t serial) {
  io::SpectrumRecord r;
  r.name = "rec" + std::to_string(serial);
  r.smiles = smiles;
  r.peaks = {{static_cast<double>(10 + serial % 400), 1.0}};
  return r;
}

struct PlantedCorpus {
  std::vector<io::SpectrumRecord> records;
  std::size_t compounds = 0;
};

/// `n` records over `compounds` distinct compounds; every compound appears at
/// least once and repeats use a mix of both spellings.
inline PlantedCorpus planted_corpus(Rng& rng, std::size_t n, std::size_t compounds) {
  PlantedCorpus out;
  out.compounds = compounds;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i < compounds ? i : pick(rng, compounds);
    out.records.push_back(record_for(chance(rng, 0.5) ? distinct_compound(c) : respelled(c), i));
  }
  curate::shuffle(out.records, rng);
  return out;
}

}  // namespace specid::testing
