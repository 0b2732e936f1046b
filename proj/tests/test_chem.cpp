#include <doctest.h>

#include "specid/chem.hpp"
#include "specid/error.hpp"
#include "specid/fingerprint.hpp"
#include "specid/smiles.hpp"
#include "support/generators.hpp"

using namespace specid;
using namespace specid::chem;

TEST_CASE("parse: methane and benzene") {
  const auto m = parse_smiles("C");
  REQUIRE(m.atom_count() == 1);
  CHECK(m.atom(0).hydrogens == 4);

  const auto b = parse_smiles("c1ccccc1");
  REQUIRE(b.atom_count() == 6);
  CHECK(b.bond_count() == 6);
  const auto ring = ring_atoms(b);
  for (int i = 0; i < 6; ++i) {
    CHECK(b.atom(i).aromatic);
    CHECK(b.atom(i).hydrogens == 1);
    CHECK(ring[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("parse: implicit hydrogens and brackets") {
  CHECK(parse_smiles("O").atom(0).hydrogens == 2);
  CHECK(parse_smiles("C=O").atom(0).hydrogens == 2);
  CHECK(parse_smiles("C#N").atom(0).hydrogens == 1);
  CHECK(parse_smiles("FC(F)(F)Cl").atom(1).hydrogens == 0);
  CHECK(parse_smiles("P").atom(0).hydrogens == 3);
  CHECK(parse_smiles("CS(=O)(=O)C").atom(1).hydrogens == 0);
  CHECK(parse_smiles("c1cc[nH]c1").atom(3).hydrogens == 1);
  CHECK(parse_smiles("c1ccncc1").atom(3).hydrogens == 0);
  const auto n = parse_smiles("[NH4+]");
  CHECK(n.atom(0).charge == 1);
  CHECK(n.atom(0).hydrogens == 4);
  const auto c13 = parse_smiles("[13CH4]");
  CHECK(c13.atom(0).isotope == 13);
  CHECK(parse_smiles("[Fe+3]").atom(0).charge == 3);
  CHECK(parse_smiles("[O--]").atom(0).charge == -2);
  CHECK(parse_smiles("[CH3:7]C").atom(0).hydrogens == 3);
}

TEST_CASE("parse: explicit hydrogen handling") {
  const auto folded = parse_smiles("[H]C([H])([H])[H]");
  CHECK(folded.atom_count() == 1);
  CHECK(folded.atom(0).hydrogens == 4);
  CHECK(canonical_smiles(folded) == canonicalize("C"));
  const auto d = parse_smiles("[2H]C([2H])([2H])O");
  CHECK(d.atom_count() == 5);
  CHECK(has_deuterium(d));
  CHECK_FALSE(has_deuterium(parse_smiles("[13CH3]O")));
  CHECK(parse_smiles("[H][H]").atom_count() == 2);
}

TEST_CASE("parse: errors") {
  auto syntax_at = [](const char* s) -> std::size_t {
    try {
      parse_smiles(s);
    } catch (const SmilesSyntaxError& e) {
      return e.offset();
    }
    return static_cast<std::size_t>(-1);
  };
  CHECK_THROWS_AS(parse_smiles("C1CC"), SmilesSyntaxError);
  CHECK_THROWS_AS(parse_smiles("C(C"), SmilesSyntaxError);
  CHECK_THROWS_AS(parse_smiles("C)C"), SmilesSyntaxError);
  CHECK_THROWS_AS(parse_smiles("[C"), SmilesSyntaxError);
  CHECK_THROWS_AS(parse_smiles("CC=="), SmilesSyntaxError);
  CHECK_THROWS_AS(parse_smiles("C11"), SmilesSyntaxError);
  CHECK(syntax_at("CC?C") == 2);
  CHECK_THROWS_AS(parse_smiles("C(C)(C)(C)(C)C"), ValenceError);
  CHECK_THROWS_AS(parse_smiles("FF(F)"), ValenceError);
  CHECK_THROWS_AS(parse_smiles("[Xx]"), SmilesSyntaxError);
}

TEST_CASE("parse: ring closures and components") {
  const auto g = parse_smiles("C%12CC%12.[Na+].[Cl-]");
  CHECK(g.atom_count() == 5);
  CHECK(g.bond_count() == 3);
  const auto comp = connected_components(g);
  CHECK(comp == std::vector<int>{0, 0, 0, 1, 2});
  const auto cyclohexene = parse_smiles("C1=CCCCC1");
  CHECK(cyclohexene.bond(0).order == BondOrder::double_);
}

TEST_CASE("canonical: traversal independence") {
  CHECK(canonicalize("OCC") == canonicalize("CCO"));
  CHECK(canonicalize("c1ccccc1O") == canonicalize("Oc1ccccc1"));
  CHECK(canonicalize("C1CCCCC1") == canonicalize("C1CCCCC1"));
  CHECK(canonicalize("[Na+].[Cl-]") == canonicalize("[Cl-].[Na+]"));
  CHECK(canonicalize("CC(=O)O") == canonicalize("OC(C)=O"));
  CHECK(canonicalize("CCO") != canonicalize("COC"));
}

TEST_CASE("canonical: stereo stripping") {
  CHECK(canonicalize("C/C=C/C") == canonicalize("CC=CC"));
  CHECK(canonicalize("C/C=C\\C") == canonicalize("CC=CC"));
  CHECK(canonicalize("N[C@@H](C)C(=O)O") == canonicalize("NC(C)C(=O)O"));
}

TEST_CASE("canonical: stereo kept when asked") {
  const auto trans = canonicalize("C/C=C/C", false);
  const auto cis = canonicalize("C/C=C\\C", false);
  CHECK(trans != cis);
  CHECK(canonicalize("C\\C=C\\C", false) == trans);
  CHECK(canonicalize("C(/C)=C/C", false) == cis);
  const auto l = canonicalize("N[C@@H](C)C(=O)O", false);
  const auto d = canonicalize("N[C@H](C)C(=O)O", false);
  CHECK(l != d);
  CHECK(canonicalize("C[C@H](N)C(=O)O", false) == l);
  CHECK(canonicalize(l, false) == l);
}

TEST_CASE("canonical: permutation fuzz with idempotence") {
  testing::Rng rng(99);
  testing::MolGenOptions opt;
  int checked = 0;
  for (int t = 0; t < 2000; ++t) {
    opt.stereo = t % 2 == 0 ? 0.0 : 0.5;
    const bool strip = opt.stereo == 0.0;
    const auto g = parse_smiles(to_smiles(testing::random_molecule(rng, opt), !strip));
    const auto s = canonical_smiles(g, strip);
    const auto p = canonical_smiles(testing::shuffle_atoms(g, rng), strip);
    if (s != p || canonicalize(s, strip) != s) {
      INFO("input " << to_smiles(g));
      CHECK(s == p);
      CHECK(canonicalize(s, strip) == s);
    }
    ++checked;
  }
  CHECK(checked == 2000);
}

TEST_CASE("formula and nominal mass") {
  CHECK(molecular_formula(parse_smiles("C")) == Formula{{"C", 1}, {"H", 4}});
  CHECK(nominal_mass(parse_smiles("C")) == 16);
  CHECK(molecular_formula(parse_smiles("c1ccccc1")) == Formula{{"C", 6}, {"H", 6}});
  CHECK(nominal_mass(parse_smiles("c1ccccc1")) == 78);
  CHECK(molecular_formula(MolecularGraph{}).empty());
  CHECK(nominal_mass(MolecularGraph{}) == 0);
  CHECK(nominal_mass(parse_smiles("CN1C=NC2=C1C(=O)N(C)C(=O)N2C")) == 194);
  CHECK(nominal_mass(parse_smiles("[13CH4]")) == 17);
  CHECK(nominal_mass(parse_smiles("[2H]C([2H])([2H])O")) == 35);
  CHECK(molecular_formula(parse_smiles("[2H]O")) == Formula{{"H", 2}, {"O", 1}});
  CHECK(nominal_mass(Formula{{"Cl", 1}, {"Na", 1}}) == 58);
  CHECK_THROWS_AS(nominal_mass(Formula{{"Qq", 1}}), UnknownElement);
  CHECK(format_formula({{"C", 8}, {"H", 10}, {"N", 4}, {"O", 2}}) == "C8H10N4O2");
  CHECK(format_formula({{"Na", 1}, {"Cl", 1}}) == "ClNa");
  CHECK(parse_formula("C7H8N4O2") == Formula{{"C", 7}, {"H", 8}, {"N", 4}, {"O", 2}});
  CHECK_THROWS_AS(parse_formula("c7"), FormatError);
  CHECK(nominal_mass_table().at("Br") == 79);
}

TEST_CASE("fingerprint: invariance and bounds") {
  CHECK(morgan_fingerprint(parse_smiles("CCO")) == morgan_fingerprint(parse_smiles("OCC")));
  const auto b = morgan_fingerprint(parse_smiles("c1ccccc1"));
  CHECK(b.popcount() >= 1);
  CHECK(b.popcount() <= b.width());
  CHECK(morgan_fingerprint(parse_smiles("CCO"), 2, 64).width() == 64);
  CHECK_THROWS_AS(Fingerprint(100, 2), ConfigError);
  CHECK_THROWS_AS(Fingerprint(32, 2), ConfigError);

  testing::Rng rng(1234);
  for (int t = 0; t < 1000; ++t) {
    const auto g = testing::random_molecule(rng);
    const auto h = testing::shuffle_atoms(g, rng);
    REQUIRE(morgan_fingerprint(g) == morgan_fingerprint(h));
  }
}

TEST_CASE("fingerprint: radius grows the bit set") {
  const auto g = parse_smiles("CC(=O)Nc1ccc(O)cc1");
  CHECK(morgan_fingerprint(g, 0).popcount() <= morgan_fingerprint(g, 1).popcount());
  CHECK(morgan_fingerprint(g, 1).popcount() <= morgan_fingerprint(g, 2).popcount());
}

TEST_CASE("tanimoto") {
  Fingerprint a(64, 0);
  Fingerprint b(64, 0);
  CHECK(tanimoto(a, b) == 1.0);
  for (int bit : {1, 2, 3}) a.set(static_cast<std::size_t>(bit));
  for (int bit : {2, 3, 4}) b.set(static_cast<std::size_t>(bit));
  CHECK(tanimoto(a, b) == 0.5);
  CHECK(tanimoto(a, a) == 1.0);
  Fingerprint c(64, 0);
  c.set(40);
  CHECK(tanimoto(a, c) == 0.0);
  CHECK_THROWS_AS(tanimoto(a, Fingerprint(128, 0)), WidthMismatch);

  const auto& pool = testing::smiles_pool();
  for (const auto& x : pool) {
    const auto fx = morgan_fingerprint(parse_smiles(x));
    CHECK(tanimoto(fx, fx) == 1.0);
    for (const auto& y : pool) {
      const auto fy = morgan_fingerprint(parse_smiles(y));
      CHECK(tanimoto(fx, fy) == tanimoto(fy, fx));
    }
  }
}

TEST_CASE("graph utilities") {
  const auto g = parse_smiles("C1CC1C");
  const auto rb = ring_bonds(g);
  CHECK(std::count(rb.begin(), rb.end(), true) == 3);
  const auto u = disjoint_union(g, parse_smiles("O"));
  CHECK(u.atom_count() == 5);
  CHECK(connected_components(u).back() == 1);
  CHECK_THROWS_AS(MolecularGraph{}.add_bond(0, 1, BondOrder::single), std::invalid_argument);
  MolecularGraph m;
  m.add_atom({"C"});
  m.add_atom({"C"});
  m.add_bond(0, 1, BondOrder::single);
  CHECK_THROWS_AS(m.add_bond(1, 0, BondOrder::double_), std::invalid_argument);
  CHECK_THROWS_AS(m.add_bond(1, 1, BondOrder::single), std::invalid_argument);
  CHECK(atomic_number("Cl") == 17);
  CHECK(atomic_number("Zz") == 0);
}
