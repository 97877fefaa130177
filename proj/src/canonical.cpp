#include <algorithm>
#include <numeric>
#include <tuple>

#include "smienum/smiles.hpp"

namespace smienum {

namespace {

template <class Key>
std::vector<int> dense_ranks(const std::vector<Key> &keys) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> rank(n);
  int current = 0;
  for (int i = 0; i < n; ++i) {
    if (i > 0 && keys[idx[i - 1]] < keys[idx[i]]) ++current;
    rank[idx[i]] = current;
  }
  return rank;
}

int class_count(const std::vector<int> &rank) {
  return rank.empty() ? 0 : *std::max_element(rank.begin(), rank.end()) + 1;
}

// Splits classes by the multiset of (neighbour class, bond order) until the
// partition stops changing. Bond orders take part so that, for example, the
// two ring neighbours of an atom in a Kekule ring are told apart.
std::vector<int> refine(const Molecule &mol, std::vector<int> rank) {
  using Key = std::pair<int, std::vector<std::pair<int, int>>>;
  const int n = mol.atom_count();
  int classes = class_count(rank);
  while (classes < n) {
    std::vector<Key> keys(n);
    for (int u = 0; u < n; ++u) {
      keys[u].first = rank[u];
      auto &env = keys[u].second;
      for (int v: mol.neighbors(u)) {
        const int order =
            static_cast<int>(mol.bonds()[mol.bond_between(u, v)].order);
        env.emplace_back(rank[v], order);
      }
      std::sort(env.begin(), env.end());
    }
    std::vector<int> next = dense_ranks(keys);
    const int next_classes = class_count(next);
    rank = std::move(next);
    if (next_classes == classes) break;
    classes = next_classes;
  }
  return rank;
}

std::vector<int> initial_ranks(const Molecule &mol) {
  using Key = std::tuple<std::string, int, int, bool, int, int>;
  std::vector<Key> keys;
  keys.reserve(mol.atom_count());
  for (int i = 0; i < mol.atom_count(); ++i) {
    const Atom &a = mol.atom(i);
    keys.emplace_back(a.element, mol.degree(i), a.formal_charge, a.aromatic,
                      a.explicit_h.value_or(-1), a.isotope.value_or(-1));
  }
  return dense_ranks(keys);
}

}  // namespace

std::vector<int> refined_classes(const Molecule &mol) {
  return refine(mol, initial_ranks(mol));
}

CanonicalRanks canonical_ranks(const Molecule &mol) {
  const int n = mol.atom_count();
  std::vector<int> rank = refined_classes(mol);
  while (class_count(rank) < n) {
    std::vector<int> size(n, 0);
    for (int r: rank) ++size[r];
    int target = 0;
    while (size[target] < 2) ++target;
    int chosen = 0;
    while (rank[chosen] != target) ++chosen;

    std::vector<int> promoted(n);
    for (int u = 0; u < n; ++u)
      promoted[u] = 2 * rank[u] + (rank[u] == target && u != chosen ? 1 : 0);
    rank = refine(mol, dense_ranks(promoted));
  }
  return { std::move(rank) };
}

std::string canonical_smiles(const Molecule &mol) {
  const CanonicalRanks ranks = canonical_ranks(mol);
  std::vector<int> order(mol.atom_count());
  for (int u = 0; u < mol.atom_count(); ++u)
    order[ranks.rank[u]] = u;
  return write_smiles(mol, order);
}

std::string canonicalize(std::string_view text) {
  return canonical_smiles(parse_molecule(text));
}

}  // namespace smienum
