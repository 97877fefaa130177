#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smienum/molecule.hpp"

namespace smienum {

struct ParseWarning {
  std::size_t position;
  std::string message;
};

struct ParseDiagnostics {
  std::vector<ParseWarning> warnings;
  // Set iff the input contained '/', '\' or '@'. Stereo is not modelled.
  bool stripped_stereo = false;
};

struct ParseResult {
  Molecule molecule;
  ParseDiagnostics diagnostics;
};

// Parses a single-fragment SMILES. Surrounding spaces (padding) are ignored.
// Throws ParseError with the offending character position.
ParseResult parse_smiles(std::string_view text);

// Convenience wrapper discarding diagnostics.
Molecule parse_molecule(std::string_view text);

// Depth-first SMILES emission. Traversal starts at order[0]; at every atom
// the unvisited neighbours are taken in ascending position within `order`.
std::string write_smiles(const Molecule &mol, std::span<const int> order);

// Writes with the identity ordering.
std::string write_smiles(const Molecule &mol);

struct CanonicalRanks {
  std::vector<int> rank;
};

// Ranks before tie-breaking: the stable partition from iterative refinement.
// Equal ranks mean the refinement could not distinguish the atoms.
std::vector<int> refined_classes(const Molecule &mol);

// Refinement followed by tie-breaking; the result is a permutation.
CanonicalRanks canonical_ranks(const Molecule &mol);

std::string canonical_smiles(const Molecule &mol);

// parse + canonical_smiles. Propagates parse errors.
std::string canonicalize(std::string_view text);

}  // namespace smienum
