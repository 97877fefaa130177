#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "smienum/molecule.hpp"

namespace smienum {

// Largest molecule accepted by enumerate_exhaustive (n! orderings).
inline constexpr int kExhaustiveAtomLimit = 8;

// Writes the molecule under `attempts` random atom orderings and keeps the
// distinct strings in first-seen order. Deterministic for a given seed.
std::vector<std::string> enumerate_random(const Molecule &mol, int attempts,
                                          std::uint64_t seed);

// Every distinct string over all atom orderings, in lexicographic
// permutation order. Throws Error(kSizeLimit) above kExhaustiveAtomLimit.
std::vector<std::string> enumerate_exhaustive(const Molecule &mol);

// Per-molecule seed so that parallel and serial augmentation agree.
std::uint64_t molecule_seed(std::uint64_t seed, std::string_view molecule_id);

}  // namespace smienum
