#include "smienum/enumerator.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "smienum/error.hpp"
#include "smienum/random.hpp"
#include "smienum/smiles.hpp"

namespace smienum {

namespace {

class UniqueStrings {
 public:
  void add(std::string s) {
    if (seen_.insert(s).second) ordered_.push_back(std::move(s));
  }
  std::vector<std::string> take() { return std::move(ordered_); }

 private:
  std::unordered_set<std::string> seen_;
  std::vector<std::string> ordered_;
};

}  // namespace

std::vector<std::string> enumerate_random(const Molecule &mol, int attempts,
                                          std::uint64_t seed) {
  if (attempts < 1)
    throw Error(ErrorCode::kInvalidArgument, "attempts must be at least 1");
  Rng rng(seed);
  UniqueStrings result;
  for (int i = 0; i < attempts; ++i) {
    const std::vector<int> order = rng.permutation(mol.atom_count());
    result.add(write_smiles(permute(mol, order)));
  }
  return result.take();
}

std::vector<std::string> enumerate_exhaustive(const Molecule &mol) {
  if (mol.atom_count() > kExhaustiveAtomLimit)
    throw Error(ErrorCode::kSizeLimit,
                "exhaustive enumeration limited to "
                    + std::to_string(kExhaustiveAtomLimit) + " atoms, got "
                    + std::to_string(mol.atom_count()));
  std::vector<int> order(mol.atom_count());
  std::iota(order.begin(), order.end(), 0);
  UniqueStrings result;
  do {
    result.add(write_smiles(mol, order));
  } while (std::next_permutation(order.begin(), order.end()));
  return result.take();
}

std::uint64_t molecule_seed(std::uint64_t seed, std::string_view molecule_id) {
  return seed ^ stable_hash(molecule_id);
}

}  // namespace smienum
