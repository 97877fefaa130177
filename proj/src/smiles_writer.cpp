#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <numeric>

#include "smienum/error.hpp"
#include "smienum/smiles.hpp"

namespace smienum {

namespace {

void append_atom(std::string &out, const Atom &atom) {
  std::string symbol = atom.element;
  if (atom.aromatic) symbol[0] = static_cast<char>(std::tolower(symbol[0]));
  if (!atom.bracket) {
    out += symbol;
    return;
  }
  out += '[';
  if (atom.isotope) out += std::to_string(*atom.isotope);
  out += symbol;
  const int h = atom.explicit_h.value_or(0);
  if (h > 0) {
    out += 'H';
    if (h > 1) out += std::to_string(h);
  }
  if (atom.formal_charge != 0) {
    out += atom.formal_charge > 0 ? '+' : '-';
    const int magnitude = std::abs(atom.formal_charge);
    if (magnitude > 1) out += std::to_string(magnitude);
  }
  out += ']';
}

// Single bonds between two aromatic atoms need '-', or they would re-parse
// as aromatic.
void append_bond(std::string &out, const Molecule &mol, int bond_index) {
  const Bond &bond = mol.bonds()[bond_index];
  switch (bond.order) {
  case BondOrder::kSingle:
    if (mol.atom(bond.a).aromatic && mol.atom(bond.b).aromatic) out += '-';
    break;
  case BondOrder::kDouble:
    out += '=';
    break;
  case BondOrder::kTriple:
    out += '#';
    break;
  case BondOrder::kAromatic:
    if (!(mol.atom(bond.a).aromatic && mol.atom(bond.b).aromatic)) out += ':';
    break;
  }
}

void append_ring_digit(std::string &out, int digit) {
  if (digit < 10) {
    out += static_cast<char>('0' + digit);
  } else if (digit < 100) {
    out += '%';
    out += std::to_string(digit);
  } else {
    throw Error(ErrorCode::kSizeLimit, "more than 99 simultaneously open rings");
  }
}

class Writer {
 public:
  Writer(const Molecule &mol, std::span<const int> order)
      : mol_(mol), n_(mol.atom_count()) {
    check_permutation(order, n_);
    position_ = inverse_permutation(order);
    start_ = order[0];
  }

  std::string run() {
    build_tree();
    std::string out;
    emit(out, start_);
    return out;
  }

 private:
  struct Closure {
    int bond;
    int partner;
  };

  void build_tree() {
    children_.assign(n_, {});
    closures_.assign(n_, {});
    dfs_index_.assign(n_, -1);
    std::vector<int> parent(n_, -1);
    std::vector<bool> closure_seen(mol_.bond_count(), false);

    std::vector<std::vector<int>> sorted(n_);
    for (int u = 0; u < n_; ++u) {
      sorted[u] = mol_.neighbors(u);
      std::sort(sorted[u].begin(), sorted[u].end(), [&](int a, int b) {
        return position_[a] < position_[b];
      });
    }

    // Explicit stack: (atom, next neighbour slot).
    std::vector<std::pair<int, std::size_t>> stack;
    int counter = 0;
    dfs_index_[start_] = counter++;
    stack.emplace_back(start_, 0);
    while (!stack.empty()) {
      auto &[u, slot] = stack.back();
      if (slot == sorted[u].size()) {
        stack.pop_back();
        continue;
      }
      const int v = sorted[u][slot++];
      if (v == parent[u]) continue;
      if (dfs_index_[v] < 0) {
        parent[v] = u;
        children_[u].push_back(v);
        dfs_index_[v] = counter++;
        stack.emplace_back(v, 0);
      } else {
        const int bond = mol_.bond_between(u, v);
        if (!closure_seen[bond]) {
          closure_seen[bond] = true;
          closures_[u].push_back({ bond, v });
          closures_[v].push_back({ bond, u });
        }
      }
    }
  }

  int take_digit() {
    int d = 1;
    while (std::find(open_digits_.begin(), open_digits_.end(), d)
           != open_digits_.end())
      ++d;
    open_digits_.push_back(d);
    return d;
  }

  void emit(std::string &out, int root) {
    struct Frame {
      int atom;
      std::size_t child;
      bool parenthesized;
    };
    std::vector<Frame> stack;
    emit_atom(out, root);
    stack.push_back({ root, 0, false });
    while (!stack.empty()) {
      Frame &frame = stack.back();
      const auto &kids = children_[frame.atom];
      if (frame.child == kids.size()) {
        if (frame.parenthesized) out += ')';
        stack.pop_back();
        continue;
      }
      const int parent = frame.atom;
      const int child = kids[frame.child++];
      const bool branch = frame.child < kids.size();
      if (branch) out += '(';
      append_bond(out, mol_, mol_.bond_between(parent, child));
      emit_atom(out, child);
      stack.push_back({ child, 0, branch });
    }
  }

  void emit_atom(std::string &out, int u) {
    append_atom(out, mol_.atom(u));

    std::vector<std::pair<int, int>> closing;  // (digit, bond)
    std::vector<Closure> opening;
    for (const Closure &c: closures_[u]) {
      if (dfs_index_[c.partner] < dfs_index_[u]) {
        closing.emplace_back(ring_digit_[c.bond], c.bond);
      } else {
        opening.push_back(c);
      }
    }
    std::sort(closing.begin(), closing.end());
    for (const auto &[digit, bond]: closing) {
      append_ring_digit(out, digit);
      open_digits_.erase(
          std::find(open_digits_.begin(), open_digits_.end(), digit));
    }
    std::sort(opening.begin(), opening.end(),
              [&](const Closure &a, const Closure &b) {
                return position_[a.partner] < position_[b.partner];
              });
    for (const Closure &c: opening) {
      const int digit = take_digit();
      ring_digit_[c.bond] = digit;
      append_bond(out, mol_, c.bond);
      append_ring_digit(out, digit);
    }
  }

  const Molecule &mol_;
  int n_;
  int start_ = 0;
  std::vector<int> position_;
  std::vector<int> dfs_index_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<Closure>> closures_;
  std::map<int, int> ring_digit_;
  std::vector<int> open_digits_;
};

}  // namespace

std::string write_smiles(const Molecule &mol, std::span<const int> order) {
  return Writer(mol, order).run();
}

std::string write_smiles(const Molecule &mol) {
  std::vector<int> identity(mol.atom_count());
  std::iota(identity.begin(), identity.end(), 0);
  return write_smiles(mol, identity);
}

}  // namespace smienum
