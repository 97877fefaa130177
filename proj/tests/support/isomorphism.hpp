#pragma once

// Backtracking graph isomorphism over labeled atoms and bond orders. Used as
// an oracle that does not depend on canonical ranking.

#include <vector>

#include "smienum/molecule.hpp"

namespace smienum::testing {

namespace detail {

inline bool same_label(const Atom &a, const Atom &b) {
  return a.element == b.element && a.aromatic == b.aromatic
         && a.formal_charge == b.formal_charge && a.explicit_h == b.explicit_h
         && a.isotope == b.isotope;
}

inline bool extend(const Molecule &a, const Molecule &b,
                   const std::vector<int> &order, std::size_t k,
                   std::vector<int> &map, std::vector<bool> &used) {
  if (k == order.size()) return true;
  const int u = order[k];
  for (int v = 0; v < b.atom_count(); ++v) {
    if (used[v] || !same_label(a.atom(u), b.atom(v))
        || a.degree(u) != b.degree(v))
      continue;
    bool ok = true;
    for (int n: a.neighbors(u)) {
      if (map[n] < 0) continue;
      const int eb = b.bond_between(v, map[n]);
      if (eb < 0 || b.bonds()[eb].order != a.bonds()[a.bond_between(u, n)].order) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    map[u] = v;
    used[v] = true;
    if (extend(a, b, order, k + 1, map, used)) return true;
    map[u] = -1;
    used[v] = false;
  }
  return false;
}

}  // namespace detail

inline bool isomorphic(const Molecule &a, const Molecule &b) {
  if (a.atom_count() != b.atom_count() || a.bond_count() != b.bond_count())
    return false;
  if (a.atom_count() == 0) return true;
  // BFS order keeps every new atom adjacent to a mapped one (graphs are
  // connected), which prunes early.
  std::vector<int> order { 0 };
  std::vector<bool> seen(a.atom_count(), false);
  seen[0] = true;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int n: a.neighbors(order[i]))
      if (!seen[n]) {
        seen[n] = true;
        order.push_back(n);
      }
  std::vector<int> map(a.atom_count(), -1);
  std::vector<bool> used(b.atom_count(), false);
  return detail::extend(a, b, order, 0, map, used);
}

}  // namespace smienum::testing
