#include <cctype>
#include <sstream>

#include "chem_detail.hpp"
#include "specid/chem.hpp"
#include "specid/error.hpp"
#include "specid/formula.hpp"

namespace specid {

std::string format_formula(const Formula& formula) {
  std::string out;
  auto put = [&](const std::string& el, int n) {
    out += el;
    if (n != 1) out += std::to_string(n);
  };
  const auto c = formula.find("C");
  if (c != formula.end()) {
    put("C", c->second);
    if (auto h = formula.find("H"); h != formula.end()) put("H", h->second);
    for (const auto& [el, n] : formula)
      if (el != "C" && el != "H") put(el, n);
  } else {
    for (const auto& [el, n] : formula) put(el, n);
  }
  return out;
}

Formula parse_formula(std::string_view text) {
  Formula f;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isupper(static_cast<unsigned char>(text[i])))
      throw FormatError("bad formula '" + std::string(text) + "' at offset " + std::to_string(i), 0);
    std::string el(1, text[i++]);
    while (i < text.size() && std::islower(static_cast<unsigned char>(text[i]))) el += text[i++];
    int n = 0;
    bool has_digits = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      n = n * 10 + (text[i++] - '0');
      has_digits = true;
      if (n > 1000000) throw FormatError("formula count too large in '" + std::string(text) + "'", 0);
    }
    if (!has_digits) n = 1;
    if (n == 0) throw FormatError("zero count in formula '" + std::string(text) + "'", 0);
    f[el] += n;
  }
  return f;
}

}  // namespace specid

namespace specid::chem {

const std::map<std::string, int, std::less<>>& nominal_mass_table() {
  static const auto table = [] {
    std::map<std::string, int, std::less<>> t;
    std::istringstream in{std::string(detail::bundled_mass_table())};
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string el;
      int mass = 0;
      if (ls >> el >> mass) t[el] = mass;
    }
    return t;
  }();
  return table;
}

Formula molecular_formula(const MolecularGraph& g) {
  Formula f;
  int h = 0;
  for (const auto& a : g.atoms()) {
    ++f[a.element];
    h += a.hydrogens;
  }
  if (h > 0) f["H"] += h;
  return f;
}

namespace {

int table_mass(std::string_view element) {
  const auto& t = nominal_mass_table();
  auto it = t.find(element);
  if (it == t.end()) throw UnknownElement("no nominal mass for element '" + std::string(element) + "'");
  return it->second;
}

}  // namespace

int nominal_mass(const MolecularGraph& g) {
  int total = 0;
  int h = 0;
  for (const auto& a : g.atoms()) {
    total += a.isotope ? *a.isotope : table_mass(a.element);
    h += a.hydrogens;
  }
  if (h > 0) total += h * table_mass("H");
  return total;
}

int nominal_mass(const Formula& formula) {
  int total = 0;
  for (const auto& [el, n] : formula) total += n * table_mass(el);
  return total;
}

}  // namespace specid::chem
