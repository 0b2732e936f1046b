#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <stdexcept>

#include "chem_detail.hpp"
#include "specid/error.hpp"
#include "specid/smiles.hpp"

namespace specid::chem {

namespace {

enum class Mark : std::uint8_t { none, up, down };  // '/', '\'

struct PendingBond {
  bool present = false;
  BondOrder order = BondOrder::single;
  bool explicit_order = false;
  Mark mark = Mark::none;
  std::size_t offset = 0;
};

struct ParsedBond {
  int bond = 0;
  int first = 0;   // atom written before the mark
  int second = 0;  // atom written after the mark
  Mark mark = Mark::none;
};

struct RingOpen {
  int atom;
  PendingBond bond;
  std::size_t slot;  // index into the opener's neighbor-order list
  std::size_t offset;
};

struct AtomInfo {
  bool bracket = false;
  std::optional<Chirality> chirality;
  std::vector<int> order;  // neighbor order as written; -1 = hydrogen, -2 = ring placeholder
};

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  MolecularGraph run() {
    if (s_.empty()) throw SmilesSyntaxError("empty SMILES", 0);
    int prev = -1;
    std::vector<int> branches;
    PendingBond pending;

    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '(') {
        if (prev < 0) throw SmilesSyntaxError("branch without a preceding atom", pos_);
        if (pending.present) throw SmilesSyntaxError("bond before '('", pos_);
        branches.push_back(prev);
        ++pos_;
      } else if (c == ')') {
        if (branches.empty()) throw SmilesSyntaxError("unmatched ')'", pos_);
        if (pending.present) throw SmilesSyntaxError("dangling bond before ')'", pending.offset);
        if (pos_ > 0 && s_[pos_ - 1] == '(') throw SmilesSyntaxError("empty branch", pos_);
        prev = branches.back();
        branches.pop_back();
        ++pos_;
      } else if (c == '.') {
        if (pending.present) throw SmilesSyntaxError("bond before '.'", pending.offset);
        if (!branches.empty()) throw SmilesSyntaxError("'.' inside a branch", pos_);
        prev = -1;
        ++pos_;
      } else if (is_bond_char(c)) {
        if (pending.present) throw SmilesSyntaxError("two consecutive bond symbols", pos_);
        pending = read_bond();
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev < 0) throw SmilesSyntaxError("ring closure without an atom", pos_);
        const std::size_t at = pos_;
        const int number = read_ring_number();
        ring_closure(prev, number, pending, at);
        pending = {};
      } else {
        const std::size_t at = pos_;
        const int atom = (c == '[') ? read_bracket_atom(prev < 0) : read_organic_atom();
        if (prev >= 0) connect(prev, atom, pending, at);
        else if (pending.present) throw SmilesSyntaxError("bond without a preceding atom", pending.offset);
        pending = {};
        prev = atom;
      }
    }
    if (pending.present) throw SmilesSyntaxError("dangling bond at end", pending.offset);
    if (!branches.empty()) throw SmilesSyntaxError("unclosed branch", s_.size());
    if (!rings_.empty()) {
      const auto& open = rings_.begin()->second;
      throw SmilesSyntaxError("unmatched ring closure " + std::to_string(rings_.begin()->first),
                              open.offset);
    }
    resolve_hydrogens();
    build_stereo();
    fold_explicit_hydrogens();
    return std::move(g_);
  }

 private:
  static bool is_bond_char(char c) {
    return c == '-' || c == '=' || c == '#' || c == '$' || c == ':' || c == '/' || c == '\\';
  }

  PendingBond read_bond() {
    PendingBond b;
    b.present = true;
    b.offset = pos_;
    switch (s_[pos_]) {
      case '-': b.explicit_order = true; break;
      case '=': b.order = BondOrder::double_; b.explicit_order = true; break;
      case '#': b.order = BondOrder::triple; b.explicit_order = true; break;
      case '$': b.order = BondOrder::quadruple; b.explicit_order = true; break;
      case ':': b.order = BondOrder::aromatic; b.explicit_order = true; break;
      case '/': b.mark = Mark::up; break;
      case '\\': b.mark = Mark::down; break;
    }
    ++pos_;
    return b;
  }

  int read_ring_number() {
    if (s_[pos_] == '%') {
      if (pos_ + 2 >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(s_[pos_ + 2])))
        throw SmilesSyntaxError("'%' needs two digits", pos_);
      const int n = (s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0');
      pos_ += 3;
      return n;
    }
    return s_[pos_++] - '0';
  }

  int new_atom(Atom atom, bool bracket) {
    const int idx = g_.add_atom(std::move(atom));
    info_.push_back({});
    info_.back().bracket = bracket;
    return idx;
  }

  int read_organic_atom() {
    const char c = s_[pos_];
    Atom a;
    auto two = [&](char next) { return pos_ + 1 < s_.size() && s_[pos_ + 1] == next; };
    if (c == 'C' && two('l')) {
      a.element = "Cl";
      pos_ += 2;
    } else if (c == 'B' && two('r')) {
      a.element = "Br";
      pos_ += 2;
    } else if (c == 'B' || c == 'C' || c == 'N' || c == 'O' || c == 'P' || c == 'S' || c == 'F' ||
               c == 'I') {
      a.element = std::string(1, c);
      ++pos_;
    } else if (c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's') {
      a.element = std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      a.aromatic = true;
      ++pos_;
    } else {
      throw SmilesSyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }
    return new_atom(std::move(a), false);
  }

  int read_unsigned(std::size_t max_digits) {
    int v = 0;
    std::size_t n = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])) && n < max_digits) {
      v = v * 10 + (s_[pos_] - '0');
      ++pos_;
      ++n;
    }
    return n == 0 ? -1 : v;
  }

  int read_bracket_atom(bool first_in_component) {
    const std::size_t open = pos_;
    ++pos_;  // '['
    Atom a;
    if (const int iso = read_unsigned(4); iso >= 0) a.isotope = iso;

    if (pos_ >= s_.size()) throw SmilesSyntaxError("unterminated bracket atom", open);
    const char c = s_[pos_];
    if (std::isupper(static_cast<unsigned char>(c))) {
      std::string sym(1, c);
      if (pos_ + 1 < s_.size() && std::islower(static_cast<unsigned char>(s_[pos_ + 1]))) {
        std::string two = sym + s_[pos_ + 1];
        if (atomic_number(two) != 0) sym = two;
      }
      if (sym == "D" || sym == "T") {
        a.element = "H";
        a.isotope = sym == "D" ? 2 : 3;
      } else if (atomic_number(sym) == 0) {
        throw SmilesSyntaxError("unknown element '" + sym + "'", pos_);
      } else {
        a.element = sym;
      }
      pos_ += sym.size();
    } else if (std::islower(static_cast<unsigned char>(c))) {
      static constexpr std::array<std::string_view, 3> two_letter = {"se", "as", "te"};
      std::string sym;
      for (auto t : two_letter)
        if (s_.substr(pos_, 2) == t) sym = std::string(t);
      if (sym.empty()) {
        if (c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's')
          sym = std::string(1, c);
        else
          throw SmilesSyntaxError(std::string("bad aromatic symbol '") + c + "'", pos_);
      }
      pos_ += sym.size();
      sym[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sym[0])));
      a.element = sym;
      a.aromatic = true;
    } else {
      throw SmilesSyntaxError("expected element symbol", pos_);
    }

    std::optional<Chirality> chirality;
    if (pos_ < s_.size() && s_[pos_] == '@') {
      ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '@') {
        ++pos_;
        chirality = Chirality::clockwise;
      } else if (pos_ + 1 < s_.size() && std::isupper(static_cast<unsigned char>(s_[pos_])) &&
                 std::isupper(static_cast<unsigned char>(s_[pos_ + 1]))) {
        const auto cls = s_.substr(pos_, 2);
        pos_ += 2;
        const int n = read_unsigned(2);
        if (n < 0) throw SmilesSyntaxError("chirality class needs a number", pos_);
        if (cls == "TH" || cls == "AL") {
          if (n == 1) chirality = Chirality::anticlockwise;
          else if (n == 2) chirality = Chirality::clockwise;
          else throw SmilesSyntaxError("bad chirality number", pos_);
        } else if (cls != "SP" && cls != "TB" && cls != "OH") {
          throw SmilesSyntaxError("unknown chirality class", pos_ - 3);
        }
      } else {
        chirality = Chirality::anticlockwise;
      }
    }

    int hcount = 0;
    if (pos_ < s_.size() && s_[pos_] == 'H') {
      ++pos_;
      const int n = read_unsigned(1);
      hcount = n < 0 ? 1 : n;
    }

    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      const char sign = s_[pos_];
      ++pos_;
      int magnitude = 1;
      if (const int n = read_unsigned(2); n >= 0) {
        magnitude = n;
      } else {
        while (pos_ < s_.size() && s_[pos_] == sign) {
          ++magnitude;
          ++pos_;
        }
      }
      a.charge = sign == '+' ? magnitude : -magnitude;
    }

    if (pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;
      if (read_unsigned(8) < 0) throw SmilesSyntaxError("atom class needs a number", pos_);
    }
    if (pos_ >= s_.size() || s_[pos_] != ']')
      throw SmilesSyntaxError("expected ']'", pos_ < s_.size() ? pos_ : open);
    ++pos_;

    a.hydrogens = hcount;
    const int idx = new_atom(std::move(a), true);
    auto& inf = info_[static_cast<std::size_t>(idx)];
    inf.chirality = chirality;
    // With no preceding atom the hydrogen is the first neighbor.
    if (hcount > 0 && first_in_component) inf.order.push_back(-1);
    pending_h_[idx] = hcount > 0 && !first_in_component;
    return idx;
  }

  void push_order(int atom, int nb) {
    auto& inf = info_[static_cast<std::size_t>(atom)];
    inf.order.push_back(nb);
    // Bracket H follows the preceding atom.
    if (auto it = pending_h_.find(atom); it != pending_h_.end() && it->second) {
      inf.order.push_back(-1);
      it->second = false;
    }
  }

  BondOrder default_order(int a, int b) const {
    return g_.atom(a).aromatic && g_.atom(b).aromatic ? BondOrder::aromatic : BondOrder::single;
  }

  void connect(int from, int to, const PendingBond& pb, std::size_t offset) {
    const BondOrder order = pb.explicit_order ? pb.order : default_order(from, to);
    int idx;
    try {
      idx = g_.add_bond(from, to, order);
    } catch (const std::invalid_argument& e) {
      throw SmilesSyntaxError(e.what(), offset);
    }
    push_order(from, to);
    push_order(to, from);
    if (pb.mark != Mark::none) marks_.push_back({idx, from, to, pb.mark});
  }

  void ring_closure(int atom, int number, const PendingBond& pb, std::size_t offset) {
    auto it = rings_.find(number);
    if (it == rings_.end()) {
      auto& inf = info_[static_cast<std::size_t>(atom)];
      push_order(atom, -2);
      rings_.emplace(number, RingOpen{atom, pb, inf.order.size() - 1, offset});
      return;
    }
    const RingOpen open = it->second;
    rings_.erase(it);
    if (open.atom == atom) throw SmilesSyntaxError("ring closure to the same atom", offset);
    const auto& a = open.bond;
    const auto& b = pb;
    if (a.explicit_order && b.explicit_order && a.order != b.order)
      throw SmilesSyntaxError("conflicting ring bond orders", offset);
    BondOrder order = default_order(open.atom, atom);
    if (a.explicit_order) order = a.order;
    if (b.explicit_order) order = b.order;
    int idx;
    try {
      idx = g_.add_bond(open.atom, atom, order);
    } catch (const std::invalid_argument& e) {
      throw SmilesSyntaxError(e.what(), offset);
    }
    info_[static_cast<std::size_t>(open.atom)].order[open.slot] = atom;
    push_order(atom, open.atom);
    if (a.mark != Mark::none) marks_.push_back({idx, open.atom, atom, a.mark});
    else if (b.mark != Mark::none) marks_.push_back({idx, atom, open.atom, b.mark});
  }

  void resolve_hydrogens() {
    for (int i = 0; i < static_cast<int>(g_.atom_count()); ++i) {
      if (info_[static_cast<std::size_t>(i)].bracket) continue;
      const auto h = detail::implicit_hydrogens(g_, i);
      if (!h)
        throw ValenceError("atom " + std::to_string(i) + " (" + g_.atom(i).element +
                           ") exceeds its allowed valence");
      g_.atom(i).hydrogens = *h;
    }
  }

  // +1 when `sub` sits above `center` for a bond marked between them.
  static int side_of(const ParsedBond& m, int center) {
    const bool up = m.mark == Mark::up;
    if (m.second == center) return up ? -1 : +1;  // "sub/center"
    return up ? +1 : -1;                          // "center/sub"
  }

  void build_stereo() {
    for (int i = 0; i < static_cast<int>(g_.atom_count()); ++i) {
      const auto& inf = info_[static_cast<std::size_t>(i)];
      if (!inf.chirality) continue;
      const std::size_t arity = inf.order.size();
      if (arity < 3 || arity > 4) continue;
      g_.tetrahedral().push_back({i, inf.order, *inf.chirality});
    }
    if (marks_.empty()) return;
    auto mark_at = [&](int center, int exclude_bond) -> std::optional<std::pair<int, int>> {
      for (const auto& m : marks_) {
        if (m.bond == exclude_bond) continue;
        if (m.first != center && m.second != center) continue;
        const int sub = m.first == center ? m.second : m.first;
        return std::pair{sub, side_of(m, center)};
      }
      return std::nullopt;
    };
    for (int b = 0; b < static_cast<int>(g_.bond_count()); ++b) {
      const auto& bd = g_.bond(b);
      if (bd.order != BondOrder::double_) continue;
      const auto ma = mark_at(bd.a, b);
      const auto mb = mark_at(bd.b, b);
      if (!ma || !mb) continue;
      g_.double_bond_stereo().push_back(
          {bd.a, bd.b, ma->first, mb->first, ma->second == mb->second});
    }
  }

  void fold_explicit_hydrogens() {
    const int n = static_cast<int>(g_.atom_count());
    std::vector<bool> drop(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) {
      const auto& a = g_.atom(i);
      if (a.element != "H" || a.isotope || a.charge != 0 || a.hydrogens != 0 || g_.degree(i) != 1)
        continue;
      const auto nb = g_.neighbors(i)[0];
      if (g_.atom(nb.atom).element == "H") continue;
      if (g_.bond(nb.bond).order != BondOrder::single) continue;
      drop[static_cast<std::size_t>(i)] = true;
    }
    if (std::none_of(drop.begin(), drop.end(), [](bool d) { return d; })) return;

    std::vector<int> remap(static_cast<std::size_t>(n), -1);
    MolecularGraph out;
    for (int i = 0; i < n; ++i)
      if (!drop[static_cast<std::size_t>(i)]) remap[static_cast<std::size_t>(i)] = out.add_atom(g_.atom(i));
    for (const auto& bd : g_.bonds()) {
      const bool da = drop[static_cast<std::size_t>(bd.a)], db = drop[static_cast<std::size_t>(bd.b)];
      if (da) out.atom(remap[static_cast<std::size_t>(bd.b)]).hydrogens += 1;
      else if (db) out.atom(remap[static_cast<std::size_t>(bd.a)]).hydrogens += 1;
      else out.add_bond(remap[static_cast<std::size_t>(bd.a)], remap[static_cast<std::size_t>(bd.b)], bd.order);
    }
    for (const auto& t : g_.tetrahedral()) {
      TetrahedralStereo s{remap[static_cast<std::size_t>(t.atom)], {}, t.chirality};
      int hs = 0;
      for (int nb : t.neighbors) {
        const int m = nb < 0 ? -1 : remap[static_cast<std::size_t>(nb)];
        if (m < 0) ++hs;
        s.neighbors.push_back(m);
      }
      if (hs <= 1) out.tetrahedral().push_back(std::move(s));
    }
    for (auto d : g_.double_bond_stereo()) {
      // A folded reference hydrogen is replaced by the other substituent.
      auto fix = [&](int center, int& ref) {
        if (!drop[static_cast<std::size_t>(ref)]) {
          ref = remap[static_cast<std::size_t>(ref)];
          return true;
        }
        const int partner = center == d.begin ? d.end : d.begin;
        for (const auto& nb : g_.neighbors(center)) {
          if (nb.atom == ref || nb.atom == partner || drop[static_cast<std::size_t>(nb.atom)]) continue;
          ref = remap[static_cast<std::size_t>(nb.atom)];
          d.cis = !d.cis;
          return true;
        }
        return false;
      };
      if (!fix(d.begin, d.begin_ref) || !fix(d.end, d.end_ref)) continue;
      d.begin = remap[static_cast<std::size_t>(d.begin)];
      d.end = remap[static_cast<std::size_t>(d.end)];
      out.double_bond_stereo().push_back(d);
    }
    g_ = std::move(out);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  MolecularGraph g_;
  std::vector<AtomInfo> info_;
  std::map<int, bool> pending_h_;
  std::map<int, RingOpen> rings_;
  std::vector<ParsedBond> marks_;
};

}  // namespace

MolecularGraph parse_smiles(std::string_view smiles) { return Parser(smiles).run(); }

}  // namespace specid::chem
