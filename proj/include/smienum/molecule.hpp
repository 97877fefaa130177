#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace smienum {

enum class BondOrder : std::uint8_t {
  kSingle,
  kDouble,
  kTriple,
  kAromatic,
};

struct Atom {
  std::string element;
  bool aromatic = false;
  int formal_charge = 0;
  std::optional<int> explicit_h;
  std::optional<int> isotope;
  bool bracket = false;

  friend bool operator==(const Atom &, const Atom &) = default;
};

struct Bond {
  int a;
  int b;
  BondOrder order;

  friend bool operator==(const Bond &, const Bond &) = default;
};

// True for the elements that may be written in lowercase aromatic form.
bool is_aromatic_capable(const std::string &element);

// True for the organic subset that may be written without brackets.
bool is_organic_subset(const std::string &element);

// True for any element symbol in the periodic table.
bool is_element_symbol(const std::string &symbol);

// Connected, simple, undirected molecular graph. Immutable once built.
class Molecule {
 public:
  Molecule() = default;

  // Validates every graph and atom invariant; throws Error on violation.
  Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds);

  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }

  const std::vector<Atom> &atoms() const { return atoms_; }
  const std::vector<Bond> &bonds() const { return bonds_; }
  const Atom &atom(int i) const { return atoms_[i]; }

  const std::vector<int> &neighbors(int atom) const { return adjacency_[atom]; }
  int degree(int atom) const {
    return static_cast<int>(adjacency_[atom].size());
  }

  // Index into bonds() of the bond joining a and b, or -1.
  int bond_between(int a, int b) const;

  friend bool operator==(const Molecule &x, const Molecule &y) {
    return x.atoms_ == y.atoms_ && x.bonds_ == y.bonds_;
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<std::vector<int>> incident_;
};

// Throws Error(kInvalidPermutation) unless order is a bijection on [0, n).
void check_permutation(std::span<const int> order, int n);

std::vector<int> inverse_permutation(std::span<const int> order);

// Atom i of the result is atom order[i] of mol.
Molecule permute(const Molecule &mol, std::span<const int> order);

// Isomorphism up to atom order, decided by comparing canonical SMILES.
bool same_structure(const Molecule &a, const Molecule &b);

}  // namespace smienum
