#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <utility>

#include "smienum/error.hpp"
#include "smienum/smiles.hpp"

namespace smienum {

namespace {

struct PendingBond {
  char symbol;
  std::size_t position;
};

struct OpenRing {
  int atom;
  std::optional<PendingBond> bond;
  std::size_t position;
};

class Parser {
 public:
  Parser(std::string_view text, std::size_t offset)
      : text_(text), offset_(offset) { }

  ParseResult run() {
    if (text_.empty()) throw ParseError(offset_, "empty SMILES");

    bool after_open_paren = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(') {
        if (prev_ < 0) error("branch without a preceding atom");
        if (pending_) error("bond symbol before a branch");
        branches_.push_back(prev_);
        after_open_paren = true;
        ++pos_;
        continue;
      }
      if (c == ')') {
        if (branches_.empty()) error("unbalanced parentheses");
        if (after_open_paren) error("empty branch");
        if (pending_) error("bond symbol without a following atom");
        prev_ = branches_.back();
        branches_.pop_back();
        ++pos_;
        continue;
      }
      after_open_paren = false;

      if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/'
          || c == '\\') {
        if (prev_ < 0) error("bond symbol without a preceding atom");
        if (pending_) error("consecutive bond symbols");
        char symbol = c;
        if (c == '/' || c == '\\') {
          note_stereo("directional bond discarded");
          symbol = '-';
        }
        pending_ = PendingBond { symbol, pos_ };
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        ring_closure();
      } else if (c == '.') {
        error("multi-fragment SMILES ('.') is not supported");
      } else if (c == '[') {
        bracket_atom();
      } else if (std::isalpha(static_cast<unsigned char>(c))) {
        organic_atom();
      } else {
        error(std::string("unexpected character '") + c + "'");
      }
    }

    if (pending_) error_at(pending_->position, "dangling bond symbol");
    if (!branches_.empty()) error("unbalanced parentheses");
    if (!rings_.empty()) {
      const auto &[digit, ring] = *rings_.begin();
      error_at(ring.position,
               "unmatched ring-closure digit " + std::to_string(digit));
    }

    return { Molecule(std::move(atoms_), std::move(bonds_)),
             std::move(diagnostics_) };
  }

 private:
  [[noreturn]] void error(const std::string &message) const {
    error_at(pos_, message);
  }

  [[noreturn]] void error_at(std::size_t pos,
                             const std::string &message) const {
    throw ParseError(offset_ + pos, message);
  }

  void note_stereo(const std::string &message) {
    diagnostics_.stripped_stereo = true;
    diagnostics_.warnings.push_back({ offset_ + pos_, message });
  }

  BondOrder order_for(const std::optional<PendingBond> &bond, int a,
                      int b) const {
    const bool both_aromatic = atoms_[a].aromatic && atoms_[b].aromatic;
    if (!bond) return both_aromatic ? BondOrder::kAromatic : BondOrder::kSingle;
    switch (bond->symbol) {
    case '=':
      return BondOrder::kDouble;
    case '#':
      return BondOrder::kTriple;
    case ':':
      if (!both_aromatic)
        error_at(bond->position, "aromatic bond between non-aromatic atoms");
      return BondOrder::kAromatic;
    default:
      return BondOrder::kSingle;
    }
  }

  void add_bond(int a, int b, const std::optional<PendingBond> &bond) {
    const auto key = std::minmax(a, b);
    if (a == b) error("ring closure bonds an atom to itself");
    if (!bond_pairs_.insert(key).second)
      error("duplicate bond between the same atom pair");
    bonds_.push_back({ a, b, order_for(bond, a, b) });
  }

  void push_atom(Atom atom) {
    atoms_.push_back(std::move(atom));
    const int index = static_cast<int>(atoms_.size()) - 1;
    if (prev_ >= 0) add_bond(prev_, index, pending_);
    pending_.reset();
    prev_ = index;
  }

  void organic_atom() {
    const char c = text_[pos_];
    const char next = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
    Atom atom;
    std::size_t width = 1;
    if (c == 'C' && next == 'l') {
      atom.element = "Cl";
      width = 2;
    } else if (c == 'B' && next == 'r') {
      atom.element = "Br";
      width = 2;
    } else if (std::string_view("BCNOPSFI").find(c) != std::string_view::npos) {
      atom.element = std::string(1, c);
    } else if (std::string_view("bcnops").find(c) != std::string_view::npos) {
      atom.element = std::string(1, static_cast<char>(std::toupper(c)));
      atom.aromatic = true;
    } else {
      error(std::string("unknown element symbol '") + c + "'");
    }
    push_atom(std::move(atom));
    pos_ += width;
  }

  int read_number() {
    int value = 0;
    std::size_t digits = 0;
    while (pos_ < text_.size()
           && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      if (digits >= 6) error("number too long");
      value = value * 10 + (text_[pos_] - '0');
      ++pos_;
      ++digits;
    }
    return value;
  }

  void bracket_atom() {
    const std::size_t start = pos_;
    ++pos_;
    if (pos_ < text_.size() && text_[pos_] == ']') error("empty brackets");

    Atom atom;
    atom.bracket = true;

    if (pos_ < text_.size()
        && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      atom.isotope = read_number();
      if (*atom.isotope <= 0) error("isotope must be positive");
    }

    if (pos_ >= text_.size()) error_at(start, "unterminated bracket atom");
    const char c = text_[pos_];
    if (std::islower(static_cast<unsigned char>(c))) {
      if (std::string_view("bcnops").find(c) == std::string_view::npos)
        error(std::string("unknown aromatic element '") + c + "'");
      if (pos_ + 1 < text_.size()
          && std::islower(static_cast<unsigned char>(text_[pos_ + 1])))
        error("unsupported aromatic element");
      atom.element = std::string(1, static_cast<char>(std::toupper(c)));
      atom.aromatic = true;
      ++pos_;
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      std::string two(text_.substr(pos_, 2));
      if (two.size() == 2
          && std::islower(static_cast<unsigned char>(two[1]))
          && is_element_symbol(two)) {
        atom.element = two;
        pos_ += 2;
      } else if (is_element_symbol(std::string(1, c))) {
        atom.element = std::string(1, c);
        ++pos_;
      } else {
        error(std::string("unknown element symbol '") + c + "'");
      }
    } else {
      error("expected element symbol in bracket atom");
    }

    if (pos_ < text_.size() && text_[pos_] == '@') {
      note_stereo("chirality discarded");
      ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '@') ++pos_;
    }

    atom.explicit_h = 0;
    if (pos_ < text_.size() && text_[pos_] == 'H') {
      ++pos_;
      if (pos_ < text_.size()
          && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        atom.explicit_h = text_[pos_] - '0';
        ++pos_;
      } else {
        atom.explicit_h = 1;
      }
    }

    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const char sign = text_[pos_];
      const int unit = sign == '+' ? 1 : -1;
      ++pos_;
      if (pos_ < text_.size() && text_[pos_] == sign) {
        atom.formal_charge = 2 * unit;
        ++pos_;
      } else if (pos_ < text_.size()
                 && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        atom.formal_charge = unit * read_number();
      } else {
        atom.formal_charge = unit;
      }
    }

    if (pos_ >= text_.size()) error_at(start, "unterminated bracket atom");
    if (text_[pos_] != ']')
      error(std::string("unexpected character '") + text_[pos_]
            + "' in bracket atom");
    ++pos_;
    push_atom(std::move(atom));
  }

  void ring_closure() {
    const std::size_t start = pos_;
    if (prev_ < 0) error("ring-closure digit without a preceding atom");
    int digit;
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= text_.size()
          || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))
          || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2])))
        error("'%' must be followed by two digits");
      digit = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      digit = text_[pos_] - '0';
      ++pos_;
    }

    auto it = rings_.find(digit);
    if (it == rings_.end()) {
      rings_.emplace(digit, OpenRing { prev_, pending_, start });
      pending_.reset();
      return;
    }

    const OpenRing ring = it->second;
    rings_.erase(it);
    std::optional<PendingBond> bond = ring.bond;
    if (pending_) {
      if (bond && bond->symbol != pending_->symbol)
        error_at(start, "conflicting ring-closure bond symbols");
      bond = pending_;
    }
    pending_.reset();
    const std::size_t saved = pos_;
    pos_ = start;
    add_bond(ring.atom, prev_, bond);
    pos_ = saved;
  }

  std::string_view text_;
  std::size_t offset_;
  std::size_t pos_ = 0;

  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::set<std::pair<int, int>> bond_pairs_;
  ParseDiagnostics diagnostics_;

  int prev_ = -1;
  std::optional<PendingBond> pending_;
  std::vector<int> branches_;
  std::map<int, OpenRing> rings_;
};

}  // namespace

ParseResult parse_smiles(std::string_view text) {
  const std::size_t first = text.find_first_not_of(' ');
  if (first == std::string_view::npos) throw ParseError(0, "empty SMILES");
  const std::size_t last = text.find_last_not_of(' ');
  return Parser(text.substr(first, last - first + 1), first).run();
}

Molecule parse_molecule(std::string_view text) {
  return parse_smiles(text).molecule;
}

}  // namespace smienum
