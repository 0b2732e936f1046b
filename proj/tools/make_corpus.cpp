// Writes the bundled synthetic corpus: combinatorial SMILES (scaffold x
// substituent) and their stub-fragmenter spectra.
//
//   make_corpus <out_dir>   -> <out_dir>/smiles.txt, <out_dir>/spectra.msp
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "specid/fragmenter.hpp"
#include "specid/smiles.hpp"
#include "specid/spectra_io.hpp"

namespace {

// "{R}" marks the attachment point.
const std::vector<std::string> kScaffolds = {
    "c1ccc(cc1){R}",          "C1CCC(CC1){R}",        "c1ccc2ccccc2c1{R}",
    "c1ccncc1{R}",            "C1CCOC1{R}",           "CC(C){R}",
    "CCCC{R}",                "c1ccsc1{R}",           "O=C(O)c1ccc(cc1){R}",
    "CC(=O)Nc1ccc(cc1){R}",   "COc1ccc(cc1){R}",      "C1CCN(CC1){R}",
    "c1ccc(cc1)C(=O){R}",     "CC(C)(C)c1ccc(cc1){R}", "Clc1ccc(cc1){R}",
};

const std::vector<std::string> kSubstituents = {
    "C", "CC", "CCC", "O", "N", "F", "Cl", "Br", "OC", "C(=O)O", "C(=O)C", "C#N", "N(C)C", "S",
};

std::string substitute(std::string s, const std::string& token, const std::string& value) {
  const auto pos = s.find(token);
  return s.replace(pos, token.size(), value);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_corpus <out_dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);

  std::vector<std::string> smiles;
  std::set<std::string> seen;
  auto add = [&](const std::string& s) {
    const auto key = specid::chem::canonicalize(s);
    if (seen.insert(key).second) smiles.push_back(s);
  };
  for (const auto& scaffold : kScaffolds)
    for (const auto& sub : kSubstituents) add(substitute(scaffold, "{R}", sub));
  // para-disubstituted benzenes
  for (std::size_t i = 0; i < kSubstituents.size(); ++i)
    for (std::size_t j = i; j < kSubstituents.size(); ++j)
      add(kSubstituents[i] + "c1ccc(cc1)" + kSubstituents[j]);

  std::ofstream list(dir / "smiles.txt", std::ios::binary);
  for (const auto& s : smiles) list << s << '\n';

  std::vector<specid::io::SpectrumRecord> records;
  records.reserve(smiles.size());
  for (std::size_t i = 0; i < smiles.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "stub-%04zu", i + 1);
    records.push_back(specid::chem::synthesize_record(smiles[i], name));
  }
  specid::io::write_records(records, dir / "spectra.msp");
  std::cout << "wrote " << records.size() << " records to " << dir.string() << '\n';
  return 0;
}
