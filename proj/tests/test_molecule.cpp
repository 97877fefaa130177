#include <doctest.h>

#include <numeric>

#include "smienum/error.hpp"
#include "smienum/molecule.hpp"
#include "smienum/random.hpp"
#include "smienum/smiles.hpp"
#include "support/random_molecules.hpp"

using namespace smienum;

namespace {

Atom carbon() { return Atom { "C" }; }

}  // namespace

TEST_CASE("constructor enforces graph invariants") {
  CHECK_THROWS_AS(Molecule({ carbon() }, { { 0, 0, BondOrder::kSingle } }),
                  Error);
  CHECK_THROWS_AS(Molecule({ carbon(), carbon() },
                           { { 0, 1, BondOrder::kSingle },
                             { 1, 0, BondOrder::kDouble } }),
                  Error);
  CHECK_THROWS_AS(Molecule({ carbon(), carbon() }, {}), Error);
  CHECK_THROWS_AS(Molecule({ carbon() }, { { 0, 3, BondOrder::kSingle } }),
                  Error);
  CHECK_THROWS_AS(Molecule({ carbon(), carbon() },
                           { { 0, 1, BondOrder::kAromatic } }),
                  Error);
}

TEST_CASE("constructor enforces atom invariants") {
  Atom aromatic_fluorine { "F", true };
  CHECK_THROWS(Molecule({ aromatic_fluorine }, {}));

  Atom charged { "N" };
  charged.formal_charge = 1;
  CHECK_THROWS(Molecule({ charged }, {}));

  Atom hydrogens { "N" };
  hydrogens.explicit_h = 2;
  CHECK_THROWS(Molecule({ hydrogens }, {}));

  Atom sodium { "Na" };
  CHECK_THROWS(Molecule({ sodium }, {}));
  sodium.bracket = true;
  CHECK_NOTHROW(Molecule({ sodium }, {}));

  Atom unknown { "Xx" };
  unknown.bracket = true;
  CHECK_THROWS(Molecule({ unknown }, {}));
}

TEST_CASE("adjacency is the symmetric closure of bonds") {
  const Molecule mol = parse_molecule("CC(O)N");
  int entries = 0;
  for (int u = 0; u < mol.atom_count(); ++u) {
    for (int v: mol.neighbors(u)) {
      ++entries;
      const auto &back = mol.neighbors(v);
      CHECK(std::find(back.begin(), back.end(), u) != back.end());
      CHECK(mol.bond_between(u, v) >= 0);
    }
  }
  CHECK(entries == 2 * mol.bond_count());
}

TEST_CASE("permute relabels atoms") {
  const Molecule propane = parse_molecule("CCC");
  const std::vector<int> order = { 1, 0, 2 };
  const Molecule p = permute(propane, order);
  CHECK(p.degree(0) == 2);
  CHECK(p.degree(1) == 1);
  CHECK(p.degree(2) == 1);

  const std::vector<int> identity = { 0, 1, 2 };
  CHECK(permute(propane, identity) == propane);
}

TEST_CASE("permute rejects non-permutations") {
  const Molecule propane = parse_molecule("CCC");
  const std::vector<int> repeated = { 0, 0, 1 };
  const std::vector<int> short_order = { 0, 1 };
  const std::vector<int> out_of_range = { 0, 1, 3 };
  for (const auto *order: { &repeated, &short_order, &out_of_range }) {
    try {
      permute(propane, *order);
      FAIL("expected invalid-permutation error");
    } catch (const Error &e) {
      CHECK(e.code() == ErrorCode::kInvalidPermutation);
    }
  }
}

TEST_CASE("reversed toluene canonicalizes like the original") {
  const Molecule toluene = parse_molecule("Cc1ccccc1");
  const std::vector<int> reversed = { 6, 5, 4, 3, 2, 1, 0 };
  CHECK(canonical_smiles(permute(toluene, reversed))
        == canonical_smiles(toluene));
}

TEST_CASE("same_structure") {
  CHECK(same_structure(parse_molecule("CCC"), parse_molecule("C(C)C")));
  CHECK_FALSE(same_structure(parse_molecule("CCC"), parse_molecule("CCO")));
  CHECK_FALSE(same_structure(parse_molecule("CC=C"), parse_molecule("CCC")));
}

TEST_CASE("property: permutation invariants") {
  Rng rng(20240611);
  for (int trial = 0; trial < 150; ++trial) {
    const Molecule m = testing::random_molecule(rng, { 1, 12 });
    const std::vector<int> p = rng.permutation(m.atom_count());
    const Molecule q = permute(m, p);
    CHECK(q.atom_count() == m.atom_count());
    CHECK(q.bond_count() == m.bond_count());
    CHECK(same_structure(m, q));
    CHECK(permute(q, inverse_permutation(p)) == m);
  }
}
