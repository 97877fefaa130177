#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "smienum/error.hpp"
#include "smienum/smiles.hpp"
#include "support/random_molecules.hpp"

using namespace smienum;

namespace {

int parse_error_position(std::string_view text) {
  try {
    parse_smiles(text);
  } catch (const ParseError &e) {
    return static_cast<int>(e.position());
  }
  return -1;
}

std::string error_message(std::string_view text) {
  try {
    parse_smiles(text);
  } catch (const ParseError &e) {
    return e.what();
  }
  return "";
}

// Each ring digit must alternate open/close and end closed.
bool ring_digits_balanced(const std::string &s) {
  std::map<int, bool> open;
  bool in_bracket = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '[') in_bracket = true;
    if (c == ']') in_bracket = false;
    if (in_bracket) continue;
    int digit = -1;
    if (c == '%') {
      digit = std::stoi(s.substr(i + 1, 2));
      i += 2;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = c - '0';
    }
    if (digit >= 0) open[digit] = !open[digit];
  }
  return std::none_of(open.begin(), open.end(),
                      [](const auto &kv) { return kv.second; });
}

std::vector<int> iota_order(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST_CASE("parse linear chain") {
  const Molecule m = parse_molecule("CCC");
  CHECK(m.atom_count() == 3);
  CHECK(m.bond_count() == 2);
  for (const Bond &b: m.bonds())
    CHECK(b.order == BondOrder::kSingle);
}

TEST_CASE("parse toluene") {
  const Molecule m = parse_molecule("Cc1ccccc1");
  CHECK(m.atom_count() == 7);
  CHECK(m.bond_count() == 7);
  int aromatic_atoms = 0;
  for (const Atom &a: m.atoms()) aromatic_atoms += a.aromatic;
  CHECK(aromatic_atoms == 6);
  CHECK_FALSE(m.atom(0).aromatic);
  int aromatic_bonds = 0;
  for (const Bond &b: m.bonds())
    aromatic_bonds += b.order == BondOrder::kAromatic;
  CHECK(aromatic_bonds == 6);
  CHECK(m.bond_between(1, 6) >= 0);
}

TEST_CASE("parse charged bracket atoms") {
  const Molecule m = parse_molecule("[O-]C([NH2+])C");
  REQUIRE(m.atom_count() == 4);
  CHECK(m.atom(0).element == "O");
  CHECK(m.atom(0).formal_charge == -1);
  CHECK(m.atom(0).bracket);
  CHECK(m.atom(0).explicit_h == 0);
  CHECK(m.atom(2).element == "N");
  CHECK(m.atom(2).formal_charge == 1);
  CHECK(m.atom(2).explicit_h == 2);
  CHECK_FALSE(m.atom(1).bracket);
}

TEST_CASE("bracket atom fields") {
  const Molecule m = parse_molecule("[13CH3][Fe++][N-2][O+3][nH]1cccc1");
  CHECK(m.atom(0).isotope == 13);
  CHECK(m.atom(0).explicit_h == 3);
  CHECK(m.atom(1).element == "Fe");
  CHECK(m.atom(1).formal_charge == 2);
  CHECK(m.atom(2).formal_charge == -2);
  CHECK(m.atom(3).formal_charge == 3);
  CHECK(m.atom(4).aromatic);
  CHECK(m.atom(4).explicit_h == 1);
  CHECK(parse_molecule("[Cl-]").atom(0).element == "Cl");
  CHECK(parse_molecule("ClCBr").atom(2).element == "Br");
}

TEST_CASE("bond symbols") {
  const Molecule m = parse_molecule("C=CC#N");
  CHECK(m.bonds()[0].order == BondOrder::kDouble);
  CHECK(m.bonds()[1].order == BondOrder::kSingle);
  CHECK(m.bonds()[2].order == BondOrder::kTriple);
  const Molecule biphenyl = parse_molecule("c1ccccc1-c1ccccc1");
  CHECK(biphenyl.bonds()[6].order == BondOrder::kSingle);
  CHECK(parse_molecule("c1ccccc1:c").bonds().back().order
        == BondOrder::kAromatic);
}

TEST_CASE("ring-closure bond symbols") {
  const Molecule a = parse_molecule("C=1CCC1");
  const Molecule b = parse_molecule("C1CCC=1");
  const Molecule c = parse_molecule("C=1CCC=1");
  for (const Molecule *m: { &a, &b, &c })
    CHECK(m->bonds().back().order == BondOrder::kDouble);
  CHECK(error_message("C=1CCC#1").find("conflicting") != std::string::npos);
  const Molecule big = parse_molecule("C%12CCC%12");
  CHECK(big.bond_count() == 4);
}

TEST_CASE("stereo is discarded with diagnostics") {
  const ParseResult plain = parse_smiles("CC(N)O");
  CHECK_FALSE(plain.diagnostics.stripped_stereo);
  CHECK(plain.diagnostics.warnings.empty());

  const ParseResult chiral = parse_smiles("C[C@@H](N)O");
  CHECK(chiral.diagnostics.stripped_stereo);
  CHECK(chiral.diagnostics.warnings.size() == 1);
  CHECK(same_structure(chiral.molecule, parse_molecule("C[CH](N)O")));

  const ParseResult cis = parse_smiles("F/C=C\\F");
  CHECK(cis.diagnostics.stripped_stereo);
  CHECK(cis.diagnostics.warnings.size() == 2);
  CHECK(same_structure(cis.molecule, parse_molecule("FC=CF")));
}

TEST_CASE("pad spaces are trimmed") {
  CHECK(parse_molecule("  CCO   ").atom_count() == 3);
  CHECK(parse_error_position("  C(C ") == 2 + 3);
}

TEST_CASE("parse errors") {
  CHECK(error_message("C(C").find("unbalanced") != std::string::npos);
  CHECK(error_message("CC)").find("unbalanced") != std::string::npos);
  CHECK(error_message("C1CC").find("unmatched ring") != std::string::npos);
  CHECK(error_message("C12CCC12").find("duplicate bond") != std::string::npos);
  CHECK(error_message("C11").find("itself") != std::string::npos);
  CHECK(error_message("CXC").find("unknown element") != std::string::npos);
  CHECK(error_message("C[Xy]").find("unknown element") != std::string::npos);
  CHECK(error_message("CC.O").find("multi-fragment") != std::string::npos);
  CHECK(error_message("C[]C").find("empty brackets") != std::string::npos);
  CHECK(error_message("C=").find("dangling") != std::string::npos);
  CHECK(error_message("C:C").find("aromatic bond") != std::string::npos);
  CHECK(error_message("C()C").find("empty branch") != std::string::npos);
  CHECK(error_message("").find("empty") != std::string::npos);
  CHECK(error_message("   ").find("empty") != std::string::npos);
  CHECK(error_message("[CH4").find("unterminated") != std::string::npos);
  CHECK(error_message("[se]1cccc1").find("aromatic element")
        != std::string::npos);
  CHECK(parse_error_position("CCX") == 2);
}

TEST_CASE("write follows the traversal contract") {
  const Molecule propane = parse_molecule("CCC");
  const std::vector<int> from_end = { 0, 1, 2 };
  const std::vector<int> from_middle = { 1, 0, 2 };
  CHECK(write_smiles(propane, from_end) == "CCC");
  CHECK(write_smiles(propane, from_middle) == "C(C)C");

  const Molecule toluene = parse_molecule("Cc1ccccc1");
  CHECK(write_smiles(toluene, iota_order(7)) == "Cc1ccccc1");

  const std::vector<int> bad = { 0, 0, 1 };
  CHECK_THROWS_AS(write_smiles(propane, bad), Error);
}

TEST_CASE("write emits bond and atom forms") {
  CHECK(write_smiles(parse_molecule("C=CC#N")) == "C=CC#N");
  CHECK(write_smiles(parse_molecule("c1ccccc1-c1ccccc1"))
        == "c1ccccc1-c1ccccc1");
  CHECK(write_smiles(parse_molecule("[13CH3][N++][O-2][nH]1cccc1"))
        == "[13CH3][N+2][O-2][nH]1cccc1");
  CHECK(write_smiles(parse_molecule("C1CC=1")) == "C=1CC1");
  CHECK(write_smiles(parse_molecule("C12CC1C2")) == "C12CC1C2");
}

TEST_CASE("ring digits are reused after closing") {
  // Two fused rings sharing no digit lifetime.
  const std::string s = write_smiles(parse_molecule("C1CC1C1CC1"));
  CHECK(s == "C1CC1C1CC1");
}

TEST_CASE("ring digits above nine use percent form") {
  // Eleven three-membered rings spiro-fused onto one chain stay open at once
  // when every ring bond points back to the first atom.
  std::string smiles = "C";
  for (int d = 1; d <= 11; ++d) smiles += d < 10 ? std::to_string(d) : "%" + std::to_string(d);
  smiles += "C";
  for (int d = 11; d >= 1; --d) smiles += std::string("C") + (d < 10 ? std::to_string(d) : "%" + std::to_string(d));
  const Molecule m = parse_molecule(smiles);
  const std::string written = write_smiles(m);
  CHECK(written.find("%10") != std::string::npos);
  CHECK(same_structure(parse_molecule(written), m));
}

TEST_CASE("canonical ranks") {
  CHECK(canonical_ranks(parse_molecule("C")).rank == std::vector<int> { 0 });

  const Molecule propane = parse_molecule("CCC");
  const auto classes = refined_classes(propane);
  CHECK(classes[0] == classes[2]);
  CHECK(classes[0] != classes[1]);
  const auto ranks = canonical_ranks(propane).rank;
  CHECK(ranks[0] != ranks[2]);

  const auto benzene = refined_classes(parse_molecule("c1ccccc1"));
  CHECK(std::all_of(benzene.begin(), benzene.end(),
                    [&](int r) { return r == benzene[0]; }));
  auto final_ranks = canonical_ranks(parse_molecule("c1ccccc1")).rank;
  std::sort(final_ranks.begin(), final_ranks.end());
  CHECK(final_ranks == iota_order(6));
}

TEST_CASE("canonicalize") {
  CHECK(canonicalize("CCC") == canonicalize("C(C)C"));
  CHECK(canonicalize("CCC") == "CCC");
  CHECK(canonicalize("c1ccccc1C") == "Cc1ccccc1");
  CHECK(canonicalize("OCC") == canonicalize("C(O)C"));
  CHECK_THROWS_AS(canonicalize("C(C"), ParseError);
  // Kekule rings: bond orders take part in refinement.
  CHECK(canonicalize("C1=CC=CC=C1") == canonicalize("C=1C=CC=CC=1"));
}

TEST_CASE("every ordering of toluene canonicalizes identically") {
  const Molecule toluene = parse_molecule("Cc1ccccc1");
  const std::string expected = canonical_smiles(toluene);
  std::vector<int> order = iota_order(7);
  int count = 0;
  do {
    const std::string s = write_smiles(toluene, order);
    REQUIRE(canonicalize(s) == expected);
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  CHECK(count == 5040);
}

TEST_CASE("property: write round-trips and is canonical-invariant") {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const Molecule m = testing::random_molecule(rng, { 1, 14 });
    const std::string canonical = canonical_smiles(m);
    CHECK(canonicalize(canonical) == canonical);
    for (int k = 0; k < 5; ++k) {
      const std::vector<int> order = rng.permutation(m.atom_count());
      const std::string s = write_smiles(m, order);
      const ParseResult back = parse_smiles(s);
      CHECK(back.diagnostics.warnings.empty());
      CHECK(ring_digits_balanced(s));
      CHECK(same_structure(back.molecule, m));
      CHECK(canonicalize(s) == canonical);
    }
  }
}
