#include "smienum/molecule.hpp"

#include <algorithm>
#include <array>
#include <string_view>

#include "smienum/error.hpp"
#include "smienum/smiles.hpp"

namespace smienum {

namespace {

constexpr std::array<std::string_view, 118> kElements = {
  "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg",
  "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr",
  "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr",
  "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
  "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
  "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf",
  "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po",
  "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm",
  "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs",
  "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
};

void fail(const std::string &message) {
  throw Error(ErrorCode::kInvalidArgument, message);
}

void validate_atom(const Atom &atom, int index) {
  const std::string where = "atom " + std::to_string(index);
  if (!is_element_symbol(atom.element))
    fail(where + ": unknown element '" + atom.element + "'");
  if (atom.aromatic && !is_aromatic_capable(atom.element))
    fail(where + ": element " + atom.element + " cannot be aromatic");
  if (atom.explicit_h && (*atom.explicit_h < 0 || !atom.bracket))
    fail(where + ": explicit hydrogen count requires a bracket atom");
  if (atom.formal_charge != 0 && !atom.bracket)
    fail(where + ": charged atom must be a bracket atom");
  if (atom.isotope && (*atom.isotope <= 0 || !atom.bracket))
    fail(where + ": isotope requires a bracket atom");
  if (!atom.bracket && !is_organic_subset(atom.element))
    fail(where + ": element " + atom.element + " must be a bracket atom");
}

}  // namespace

bool is_aromatic_capable(const std::string &element) {
  return element == "B" || element == "C" || element == "N" || element == "O"
         || element == "P" || element == "S";
}

bool is_organic_subset(const std::string &element) {
  return is_aromatic_capable(element) || element == "F" || element == "Cl"
         || element == "Br" || element == "I";
}

bool is_element_symbol(const std::string &symbol) {
  return std::find(kElements.begin(), kElements.end(), symbol)
         != kElements.end();
}

Molecule::Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)),
      adjacency_(atoms_.size()), incident_(atoms_.size()) {
  const int n = atom_count();
  if (n == 0) fail("molecule has no atoms");

  for (int i = 0; i < n; ++i)
    validate_atom(atoms_[i], i);

  for (int k = 0; k < bond_count(); ++k) {
    const Bond &bond = bonds_[k];
    if (bond.a < 0 || bond.a >= n || bond.b < 0 || bond.b >= n)
      fail("bond " + std::to_string(k) + ": atom index out of range");
    if (bond.a == bond.b)
      fail("bond " + std::to_string(k) + ": self-loop");
    if (bond_between(bond.a, bond.b) >= 0)
      fail("duplicate bond between atoms " + std::to_string(bond.a) + " and "
           + std::to_string(bond.b));
    if (bond.order == BondOrder::kAromatic
        && !(atoms_[bond.a].aromatic && atoms_[bond.b].aromatic))
      fail("aromatic bond " + std::to_string(k)
           + " joins a non-aromatic atom");
    adjacency_[bond.a].push_back(bond.b);
    adjacency_[bond.b].push_back(bond.a);
    incident_[bond.a].push_back(k);
    incident_[bond.b].push_back(k);
  }

  std::vector<bool> seen(n, false);
  std::vector<int> stack = { 0 };
  seen[0] = true;
  int reached = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v: adjacency_[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  if (reached != n) fail("molecule graph is not connected");
}

int Molecule::bond_between(int a, int b) const {
  const auto &nbrs = adjacency_[a];
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    if (nbrs[i] == b) return incident_[a][i];
  }
  return -1;
}

void check_permutation(std::span<const int> order, int n) {
  if (static_cast<int>(order.size()) != n)
    throw Error(ErrorCode::kInvalidPermutation,
                "permutation has " + std::to_string(order.size())
                    + " entries, expected " + std::to_string(n));
  std::vector<bool> seen(n, false);
  for (int v: order) {
    if (v < 0 || v >= n || seen[v])
      throw Error(ErrorCode::kInvalidPermutation,
                  "not a permutation of [0, " + std::to_string(n) + ")");
    seen[v] = true;
  }
}

std::vector<int> inverse_permutation(std::span<const int> order) {
  std::vector<int> inv(order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    inv[order[i]] = static_cast<int>(i);
  return inv;
}

Molecule permute(const Molecule &mol, std::span<const int> order) {
  check_permutation(order, mol.atom_count());
  const std::vector<int> inv = inverse_permutation(order);

  std::vector<Atom> atoms;
  atoms.reserve(order.size());
  for (int old: order)
    atoms.push_back(mol.atom(old));

  std::vector<Bond> bonds;
  bonds.reserve(mol.bonds().size());
  for (const Bond &b: mol.bonds())
    bonds.push_back({ inv[b.a], inv[b.b], b.order });

  return Molecule(std::move(atoms), std::move(bonds));
}

bool same_structure(const Molecule &a, const Molecule &b) {
  if (a.atom_count() != b.atom_count() || a.bond_count() != b.bond_count())
    return false;
  return canonical_smiles(a) == canonical_smiles(b);
}

}  // namespace smienum
