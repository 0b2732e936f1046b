#include <algorithm>
#include <cctype>
#include <numeric>
#include <tuple>

#include "chem_detail.hpp"
#include "specid/error.hpp"
#include "specid/smiles.hpp"

namespace specid::chem {

namespace {

using Ranks = std::vector<int>;

int order_code(BondOrder o) { return static_cast<int>(o) + 1; }

// ---------------------------------------------------------------------------
// Invariant refinement

Ranks initial_ranks(const MolecularGraph& g) {
  const auto in_ring = ring_atoms(g);
  const std::size_t n = g.atom_count();
  using Key = std::tuple<int, int, int, int, int, int, int>;
  std::vector<Key> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = g.atom(static_cast<int>(i));
    keys[i] = {atomic_number(a.element), a.isotope.value_or(-1), a.charge, a.aromatic ? 1 : 0,
               a.hydrogens, g.degree(static_cast<int>(i)), in_ring[i] ? 1 : 0};
  }
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int x, int y) { return keys[x] < keys[y]; });
  Ranks rank(n, 0);
  int r = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && keys[idx[k]] != keys[idx[k - 1]]) ++r;
    rank[static_cast<std::size_t>(idx[k])] = r;
  }
  return rank;
}

int class_count(const Ranks& rank) {
  return rank.empty() ? 0 : *std::max_element(rank.begin(), rank.end()) + 1;
}

// Refines dense ranks by neighborhood until the partition is stable. The new
// order is lexicographic on (old rank, sorted neighbor (rank, bond) list), so
// it only ever splits classes, never reorders them.
void refine(const MolecularGraph& g, Ranks& rank) {
  const std::size_t n = g.atom_count();
  if (n == 0) return;
  int classes = class_count(rank);
  std::vector<std::vector<long long>> sig(n);
  std::vector<int> idx(n);
  while (classes < static_cast<int>(n)) {
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sig[i];
      s.clear();
      s.push_back(rank[i]);
      const std::size_t head = s.size();
      for (const auto& nb : g.neighbors(static_cast<int>(i)))
        s.push_back(static_cast<long long>(rank[static_cast<std::size_t>(nb.atom)]) * 8 +
                    order_code(g.bond(nb.bond).order));
      std::sort(s.begin() + static_cast<std::ptrdiff_t>(head), s.end());
    }
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int x, int y) { return sig[x] < sig[y]; });
    int r = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0 && sig[idx[k]] != sig[idx[k - 1]]) ++r;
      rank[static_cast<std::size_t>(idx[k])] = r;
    }
    if (r + 1 == classes) break;
    classes = r + 1;
  }
}

// ---------------------------------------------------------------------------
// Writer for one total ordering

enum class Dir : std::uint8_t { none, up, down };

class Writer {
 public:
  Writer(const MolecularGraph& g, const Ranks& rank, bool stereo, bool sort_components)
      : g_(g), rank_(rank), stereo_(stereo), sort_components_(sort_components) {}

  std::string run() {
    const std::size_t n = g_.atom_count();
    visited_.assign(n, false);
    parent_.assign(n, -1);
    parent_bond_.assign(n, -1);
    children_.assign(n, {});
    rings_at_.assign(n, {});
    ring_seen_.assign(g_.bond_count(), false);

    std::vector<int> by_rank(n);
    std::iota(by_rank.begin(), by_rank.end(), 0);
    std::sort(by_rank.begin(), by_rank.end(),
              [&](int a, int b) { return rank_[static_cast<std::size_t>(a)] < rank_[static_cast<std::size_t>(b)]; });

    std::vector<int> roots;
    for (int u : by_rank) {
      if (visited_[static_cast<std::size_t>(u)]) continue;
      roots.push_back(u);
      discover(u);
    }
    // Ring bonds at each atom in partner rank order.
    for (std::size_t u = 0; u < n; ++u) {
      auto& list = rings_at_[u];
      std::sort(list.begin(), list.end(), [&](int b1, int b2) {
        return rank_[static_cast<std::size_t>(g_.bond(b1).other(static_cast<int>(u)))] <
               rank_[static_cast<std::size_t>(g_.bond(b2).other(static_cast<int>(u)))];
      });
    }

    if (stereo_ && !g_.double_bond_stereo().empty()) assign_directions(roots);

    std::vector<std::pair<std::string, std::vector<int>>> parts;
    digits_.assign(g_.bond_count(), -1);
    used_digits_.assign(100, false);
    for (int root : roots) {
      out_.clear();
      emitted_.clear();
      emit(root, -1);
      parts.emplace_back(out_, emitted_);
    }
    if (sort_components_) std::sort(parts.begin(), parts.end());
    std::string result;
    order_.clear();
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) result += '.';
      result += parts[i].first;
      order_.insert(order_.end(), parts[i].second.begin(), parts[i].second.end());
    }
    return result;
  }

  // Atoms in the order they were written by the last run().
  const std::vector<int>& atom_order() const { return order_; }

 private:
  void discover(int u) {
    visited_[static_cast<std::size_t>(u)] = true;
    std::vector<Neighbor> nbs(g_.neighbors(u).begin(), g_.neighbors(u).end());
    std::sort(nbs.begin(), nbs.end(), [&](const Neighbor& a, const Neighbor& b) {
      return rank_[static_cast<std::size_t>(a.atom)] < rank_[static_cast<std::size_t>(b.atom)];
    });
    for (const auto& nb : nbs) {
      if (nb.bond == parent_bond_[static_cast<std::size_t>(u)]) continue;
      if (!visited_[static_cast<std::size_t>(nb.atom)]) {
        parent_[static_cast<std::size_t>(nb.atom)] = u;
        parent_bond_[static_cast<std::size_t>(nb.atom)] = nb.bond;
        children_[static_cast<std::size_t>(u)].push_back(nb);
        discover(nb.atom);
      } else if (!ring_seen_[static_cast<std::size_t>(nb.bond)]) {
        ring_seen_[static_cast<std::size_t>(nb.bond)] = true;
        rings_at_[static_cast<std::size_t>(u)].push_back(nb.bond);
        rings_at_[static_cast<std::size_t>(nb.atom)].push_back(nb.bond);
      }
    }
  }

  // Output neighbor order of u as a SMILES reader sees it.
  std::vector<int> written_neighbors(int u, bool with_h) const {
    std::vector<int> order;
    const int p = parent_[static_cast<std::size_t>(u)];
    if (p >= 0) order.push_back(p);
    if (with_h) order.push_back(-1);
    for (int b : rings_at_[static_cast<std::size_t>(u)]) order.push_back(g_.bond(b).other(u));
    for (const auto& c : children_[static_cast<std::size_t>(u)]) order.push_back(c.atom);
    return order;
  }

  std::optional<Chirality> written_chirality(int u) const {
    if (!stereo_) return std::nullopt;
    for (const auto& t : g_.tetrahedral()) {
      if (t.atom != u) continue;
      const bool has_h = std::find(t.neighbors.begin(), t.neighbors.end(), -1) != t.neighbors.end();
      const auto out = written_neighbors(u, has_h);
      if (out.size() != t.neighbors.size()) return std::nullopt;
      std::vector<int> pos;
      for (int x : out) {
        auto it = std::find(t.neighbors.begin(), t.neighbors.end(), x);
        if (it == t.neighbors.end()) return std::nullopt;
        pos.push_back(static_cast<int>(it - t.neighbors.begin()));
      }
      int inversions = 0;
      for (std::size_t i = 0; i < pos.size(); ++i)
        for (std::size_t j = i + 1; j < pos.size(); ++j)
          if (pos[i] > pos[j]) ++inversions;
      if (inversions % 2 == 0) return t.chirality;
      return t.chirality == Chirality::anticlockwise ? Chirality::clockwise
                                                     : Chirality::anticlockwise;
    }
    return std::nullopt;
  }

  // Written bonds in output order as (bond, first atom, second atom).
  void collect(int u, std::vector<std::tuple<int, int, int>>& seq, std::vector<bool>& opened) const {
    const int pb = parent_bond_[static_cast<std::size_t>(u)];
    if (pb >= 0) seq.emplace_back(pb, parent_[static_cast<std::size_t>(u)], u);
    for (int b : rings_at_[static_cast<std::size_t>(u)]) {
      if (opened[static_cast<std::size_t>(b)]) continue;
      opened[static_cast<std::size_t>(b)] = true;
      seq.emplace_back(b, u, g_.bond(b).other(u));
    }
    for (const auto& c : children_[static_cast<std::size_t>(u)]) collect(c.atom, seq, opened);
  }

  // Chooses / and \ for every single bond next to a stereo double bond.
  void assign_directions(const std::vector<int>& roots) {
    const auto& dbs = g_.double_bond_stereo();
    dir_.assign(g_.bond_count(), Dir::none);
    std::vector<int> flip(dbs.size(), 0);
    std::vector<std::vector<int>> at(g_.atom_count());
    for (std::size_t k = 0; k < dbs.size(); ++k) {
      at[static_cast<std::size_t>(dbs[k].begin)].push_back(static_cast<int>(k));
      at[static_cast<std::size_t>(dbs[k].end)].push_back(static_cast<int>(k));
    }
    auto double_bond_of = [&](int k) { return g_.bond_between(dbs[k].begin, dbs[k].end).value_or(-1); };
    // Side (+1 above, -1 below) of `sub` seen from stereo atom `center` with flip +1.
    auto base_side = [&](int k, int center, int sub) {
      const auto& d = dbs[static_cast<std::size_t>(k)];
      if (center == d.begin) return sub == d.begin_ref ? 1 : -1;
      const int ref_side = d.cis ? 1 : -1;
      return sub == d.end_ref ? ref_side : -ref_side;
    };

    std::vector<std::tuple<int, int, int>> seq;
    std::vector<bool> opened(g_.bond_count(), false);
    for (int r : roots) collect(r, seq, opened);

    // One marked bond per stereo endpoint is enough. Marks that reach an
    // atom of an unspecified double bond would specify it on reparse, so
    // those bonds are avoided when there is a choice.
    std::vector<int> pos(g_.bond_count(), 0);
    for (std::size_t i = 0; i < seq.size(); ++i) pos[static_cast<std::size_t>(std::get<0>(seq[i]))] = static_cast<int>(i);
    std::vector<bool> plain_db_atom(g_.atom_count(), false);
    {
      std::vector<bool> stereo_bond(g_.bond_count(), false);
      for (std::size_t k = 0; k < dbs.size(); ++k) {
        const int db = double_bond_of(static_cast<int>(k));
        if (db >= 0) stereo_bond[static_cast<std::size_t>(db)] = true;
      }
      for (int b = 0; b < static_cast<int>(g_.bond_count()); ++b) {
        if (g_.bond(b).order != BondOrder::double_ || stereo_bond[static_cast<std::size_t>(b)]) continue;
        plain_db_atom[static_cast<std::size_t>(g_.bond(b).a)] = true;
        plain_db_atom[static_cast<std::size_t>(g_.bond(b).b)] = true;
      }
    }
    std::vector<int> order(dbs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      return pos[static_cast<std::size_t>(double_bond_of(x))] < pos[static_cast<std::size_t>(double_bond_of(y))];
    });
    std::vector<bool> marked(g_.bond_count(), false);
    for (int k : order) {
      const int db = double_bond_of(k);
      const auto& [b0, first, second] = seq[static_cast<std::size_t>(pos[static_cast<std::size_t>(db)])];
      (void)b0;
      for (int e : {first, second}) {
        int best = -1;
        int best_class = 3;
        for (const auto& nb : g_.neighbors(e)) {
          if (nb.bond == db || g_.bond(nb.bond).order != BondOrder::single) continue;
          const int cls = marked[static_cast<std::size_t>(nb.bond)] ? 0 : plain_db_atom[static_cast<std::size_t>(nb.atom)] ? 2 : 1;
          if (cls < best_class || (cls == best_class && pos[static_cast<std::size_t>(nb.bond)] < pos[static_cast<std::size_t>(best)])) {
            best = nb.bond;
            best_class = cls;
          }
        }
        if (best >= 0) marked[static_cast<std::size_t>(best)] = true;
      }
    }

    for (const auto& [b, p, q] : seq) {
      if (!marked[static_cast<std::size_t>(b)]) continue;
      auto find_db = [&](int center) {
        for (int k : at[static_cast<std::size_t>(center)])
          if (double_bond_of(k) != b) return k;
        return -1;
      };
      const int kp = find_db(p);
      const int kq = find_db(q);
      if (kp < 0 && kq < 0) continue;
      // '/' from p to q puts q above p; equivalently p below q.
      auto want_up_p = [&](int k) { return base_side(k, p, q) * flip[static_cast<std::size_t>(k)] == 1; };
      auto want_up_q = [&](int k) { return base_side(k, q, p) * flip[static_cast<std::size_t>(k)] == -1; };
      bool up;
      if (kp >= 0 && flip[static_cast<std::size_t>(kp)] != 0) {
        up = want_up_p(kp);
      } else if (kq >= 0 && flip[static_cast<std::size_t>(kq)] != 0) {
        up = want_up_q(kq);
      } else {
        up = true;
      }
      if (kp >= 0 && flip[static_cast<std::size_t>(kp)] == 0)
        flip[static_cast<std::size_t>(kp)] = base_side(kp, p, q) * (up ? 1 : -1);
      if (kq >= 0 && flip[static_cast<std::size_t>(kq)] == 0)
        flip[static_cast<std::size_t>(kq)] = base_side(kq, q, p) * (up ? -1 : 1);
      dir_[static_cast<std::size_t>(b)] = up ? Dir::up : Dir::down;
    }
  }

  std::string bond_text(int b, int from, int to) const {
    const auto order = g_.bond(b).order;
    const bool both_aromatic = g_.atom(from).aromatic && g_.atom(to).aromatic;
    switch (order) {
      case BondOrder::single:
        if (!dir_.empty() && dir_[static_cast<std::size_t>(b)] != Dir::none)
          return dir_[static_cast<std::size_t>(b)] == Dir::up ? "/" : "\\";
        return both_aromatic ? "-" : "";
      case BondOrder::double_: return "=";
      case BondOrder::triple: return "#";
      case BondOrder::quadruple: return "$";
      case BondOrder::aromatic: return both_aromatic ? "" : ":";
    }
    return "";
  }

  std::string atom_text(int u) const {
    const Atom& a = g_.atom(u);
    const auto chir = written_chirality(u);
    std::string symbol = a.element;
    if (a.aromatic) symbol[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(symbol[0])));
    const bool organic = detail::is_organic(a.element, a.aromatic);
    if (organic && a.charge == 0 && !a.isotope && !chir) {
      const auto h = detail::implicit_hydrogens(g_, u);
      if (h && *h == a.hydrogens) return symbol;
    }
    std::string s = "[";
    if (a.isotope) s += std::to_string(*a.isotope);
    s += symbol;
    if (chir) s += *chir == Chirality::anticlockwise ? "@" : "@@";
    if (a.hydrogens > 0) {
      s += 'H';
      if (a.hydrogens > 1) s += std::to_string(a.hydrogens);
    }
    if (a.charge != 0) {
      s += a.charge > 0 ? '+' : '-';
      const int m = a.charge > 0 ? a.charge : -a.charge;
      if (m > 1) s += std::to_string(m);
    }
    s += ']';
    return s;
  }

  static std::string digit_text(int d) {
    return d < 10 ? std::string(1, static_cast<char>('0' + d)) : "%" + std::to_string(d);
  }

  void emit(int u, int from_bond) {
    if (from_bond >= 0) out_ += bond_text(from_bond, parent_[static_cast<std::size_t>(u)], u);
    out_ += atom_text(u);
    emitted_.push_back(u);
    std::vector<int> to_free;
    for (int b : rings_at_[static_cast<std::size_t>(u)]) {
      auto& d = digits_[static_cast<std::size_t>(b)];
      if (d >= 0) {
        out_ += digit_text(d);
        to_free.push_back(d);
      } else {
        int free = 1;
        while (free < 100 && used_digits_[static_cast<std::size_t>(free)]) ++free;
        if (free >= 100) throw std::length_error("more than 99 open ring closures");
        used_digits_[static_cast<std::size_t>(free)] = true;
        d = free;
        out_ += bond_text(b, u, g_.bond(b).other(u));
        out_ += digit_text(d);
      }
    }
    for (int d : to_free) used_digits_[static_cast<std::size_t>(d)] = false;
    const auto& kids = children_[static_cast<std::size_t>(u)];
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const bool branch = i + 1 < kids.size();
      if (branch) out_ += '(';
      emit(kids[i].atom, kids[i].bond);
      if (branch) out_ += ')';
    }
  }

  const MolecularGraph& g_;
  const Ranks& rank_;
  bool stereo_;
  bool sort_components_;

  std::vector<bool> visited_;
  std::vector<int> parent_;
  std::vector<int> parent_bond_;
  std::vector<std::vector<Neighbor>> children_;
  std::vector<std::vector<int>> rings_at_;
  std::vector<bool> ring_seen_;
  std::vector<Dir> dir_;

  std::string out_;
  std::vector<int> emitted_;
  std::vector<int> order_;
  std::vector<int> digits_;
  std::vector<bool> used_digits_;
};

// ---------------------------------------------------------------------------
// Tie breaking by individualization with automorphism pruning

class Canonicalizer {
 public:
  Canonicalizer(const MolecularGraph& g, bool stereo) : g_(g), stereo_(stereo) {}

  std::string run() {
    if (g_.empty()) return {};
    if (!stereo_) add_twin_generators();
    std::vector<int> path;
    search(initial_ranks(g_), path);
    return best_;
  }

 private:
  // Interchangeable terminal atoms (same attributes, same neighbor, same bond)
  // give transposition automorphisms up front.
  void add_twin_generators() {
    const int n = static_cast<int>(g_.atom_count());
    std::vector<std::tuple<int, int, std::string, int, int, int, bool, int>> terminal;
    for (int i = 0; i < n; ++i) {
      if (g_.degree(i) != 1) continue;
      const auto nb = g_.neighbors(i)[0];
      const auto& a = g_.atom(i);
      terminal.emplace_back(nb.atom, static_cast<int>(g_.bond(nb.bond).order), a.element,
                            a.charge, a.hydrogens, a.isotope.value_or(-1), a.aromatic, i);
    }
    std::sort(terminal.begin(), terminal.end());
    for (std::size_t k = 1; k < terminal.size(); ++k) {
      const auto& x = terminal[k - 1];
      const auto& y = terminal[k];
      if (std::get<0>(x) != std::get<0>(y) || std::get<1>(x) != std::get<1>(y) ||
          std::get<2>(x) != std::get<2>(y) || std::get<3>(x) != std::get<3>(y) ||
          std::get<4>(x) != std::get<4>(y) || std::get<5>(x) != std::get<5>(y) ||
          std::get<6>(x) != std::get<6>(y))
        continue;
      // g_.degree(neighbor) == 1 means an isolated pair like [H][H]; the
      // transposition is still an automorphism.
      std::vector<int> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), 0);
      std::swap(perm[static_cast<std::size_t>(std::get<7>(x))], perm[static_cast<std::size_t>(std::get<7>(y))]);
      generators_.push_back(std::move(perm));
    }
  }

  void search(Ranks rank, std::vector<int>& path) {
    refine(g_, rank);
    const int n = static_cast<int>(g_.atom_count());
    const int classes = class_count(rank);
    if (classes == n) {
      leaf(rank);
      return;
    }
    std::vector<int> size(static_cast<std::size_t>(classes), 0);
    for (int r : rank) ++size[static_cast<std::size_t>(r)];
    int target = 0;
    while (size[static_cast<std::size_t>(target)] < 2) ++target;

    std::vector<int> cell;
    for (int i = 0; i < n; ++i)
      if (rank[static_cast<std::size_t>(i)] == target) cell.push_back(i);

    std::vector<int> tried;
    for (int v : cell) {
      if (!tried.empty() && pruned(v, tried, path)) continue;
      Ranks next = rank;
      for (int i = 0; i < n; ++i) {
        auto& r = next[static_cast<std::size_t>(i)];
        if (r > target || (r == target && i != v)) ++r;
      }
      path.push_back(v);
      search(std::move(next), path);
      path.pop_back();
      tried.push_back(v);
    }
  }

  bool pruned(int v, const std::vector<int>& tried, const std::vector<int>& path) const {
    const std::size_t n = g_.atom_count();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) {
        parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        x = parent[static_cast<std::size_t>(x)];
      }
      return x;
    };
    bool any = false;
    for (const auto& gen : generators_) {
      bool fixes = true;
      for (int p : path)
        if (gen[static_cast<std::size_t>(p)] != p) {
          fixes = false;
          break;
        }
      if (!fixes) continue;
      any = true;
      for (std::size_t i = 0; i < n; ++i) {
        const int a = find(static_cast<int>(i));
        const int b = find(gen[i]);
        if (a != b) parent[static_cast<std::size_t>(a)] = b;
      }
    }
    if (!any) return false;
    const int rv = find(v);
    return std::any_of(tried.begin(), tried.end(), [&](int u) { return find(u) == rv; });
  }

  // Two leaves writing the same string differ by an automorphism that maps
  // the i-th written atom of one onto the i-th written atom of the other.
  void leaf(const Ranks& rank) {
    Writer w(g_, rank, stereo_, true);
    std::string s = w.run();
    if (best_order_.empty() || s < best_) {
      best_ = std::move(s);
      best_order_ = w.atom_order();
      return;
    }
    if (s != best_ || generators_.size() >= kMaxGenerators) return;
    const auto& cur = w.atom_order();
    std::vector<int> perm(best_order_.size());
    bool identity = true;
    for (std::size_t k = 0; k < cur.size(); ++k) {
      perm[static_cast<std::size_t>(best_order_[k])] = cur[k];
      if (best_order_[k] != cur[k]) identity = false;
    }
    if (!identity) generators_.push_back(std::move(perm));
  }

  static constexpr std::size_t kMaxGenerators = 512;

  const MolecularGraph& g_;
  bool stereo_;
  std::string best_;
  std::vector<int> best_order_;
  std::vector<std::vector<int>> generators_;
};

}  // namespace

std::string canonical_smiles(const MolecularGraph& g, bool strip_stereo) {
  const bool stereo = !strip_stereo && g.has_stereo();
  return Canonicalizer(g, stereo).run();
}

std::string canonicalize(std::string_view smiles, bool strip_stereo) {
  return canonical_smiles(parse_smiles(smiles), strip_stereo);
}

std::string to_smiles(const MolecularGraph& g, bool with_stereo) {
  Ranks rank(g.atom_count());
  std::iota(rank.begin(), rank.end(), 0);
  return Writer(g, rank, with_stereo && g.has_stereo(), false).run();
}

}  // namespace specid::chem
