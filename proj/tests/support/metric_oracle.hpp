// Brute-force reference for the evaluation metrics. Tanimoto is recomputed
// from the fingerprint bits for every comparison; nothing is cached.
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "specid/evaluate.hpp"
#include "specid/fingerprint.hpp"
#include "specid/smiles.hpp"
#include "support/generators.hpp"

namespace specid::testing {

inline double bit_tanimoto(const std::string& x, const std::string& y) {
  const auto fx = chem::morgan_fingerprint(chem::parse_smiles(x));
  const auto fy = chem::morgan_fingerprint(chem::parse_smiles(y));
  std::size_t both = 0;
  std::size_t either = 0;
  for (std::size_t b = 0; b < fx.width(); ++b) {
    both += fx.test(b) && fy.test(b);
    either += fx.test(b) || fy.test(b);
  }
  return either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
}

inline std::vector<std::string> first_k(const std::vector<std::string>& c, std::size_t k) {
  return {c.begin(), c.begin() + static_cast<std::ptrdiff_t>(std::min(k, c.size()))};
}

inline bool has(const std::vector<std::string>& c, const std::string& s) {
  for (const auto& x : c)
    if (x == s) return true;
  return false;
}

inline double max_sim(const std::vector<std::string>& c, const std::string& truth) {
  double best = 0.0;
  for (const auto& x : c) best = std::max(best, bit_tanimoto(x, truth));
  return best;
}

inline double oracle_acc(const eval::PredictionSet& p, std::size_t k) {
  std::size_t hits = 0;
  for (const auto& q : p) hits += has(first_k(q.candidates, k), q.truth) ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(p.size());
}

inline double oracle_sim(const eval::PredictionSet& p, std::size_t k) {
  double s = 0.0;
  for (const auto& q : p) s += max_sim(first_k(q.candidates, k), q.truth);
  return s / static_cast<double>(p.size());
}

inline int oracle_r(const std::vector<std::string>& l, const std::vector<std::string>& r, const std::string& g) {
  if (max_sim(l, g) > max_sim(r, g)) return 1;
  if (has(l, g) && !has(r, g)) return 1;
  return 0;
}

inline double oracle_win(const eval::PredictionSet& a, const eval::PredictionSet& b, std::size_t k) {
  std::size_t w = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    w += static_cast<std::size_t>(oracle_r(first_k(a[i].candidates, k), first_k(b[i].candidates, k), a[i].truth));
  return 100.0 * static_cast<double>(w) / static_cast<double>(a.size());
}

inline double oracle_alag(const eval::PredictionSet& a, const eval::PredictionSet& b, std::size_t k) {
  return 100.0 - oracle_win(b, a, k);
}

inline const std::vector<std::string>& canonical_pool() {
  static const std::vector<std::string> pool = [] {
    std::vector<std::string> out;
    for (const auto& s : smiles_pool()) out.push_back(chem::canonicalize(s));
    return out;
  }();
  return pool;
}

/// Two aligned prediction sets over the pool; truths sometimes appear in
/// the candidate lists.
inline std::pair<eval::PredictionSet, eval::PredictionSet> random_prediction_pair(Rng& rng, std::size_t max_n,
                                                                                  std::size_t max_len) {
  const auto& pool = canonical_pool();
  const std::size_t n = 1 + pick(rng, max_n);
  eval::PredictionSet a;
  eval::PredictionSet b;
  auto list = [&](const std::string& truth) {
    std::vector<std::string> c;
    for (std::size_t k = 0, len = pick(rng, max_len + 1); k < len; ++k)
      c.push_back(chance(rng, 0.15) ? truth : pool[pick(rng, pool.size())]);
    return c;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto& truth = pool[pick(rng, pool.size())];
    a.push_back({truth, list(truth)});
    b.push_back({truth, list(truth)});
  }
  return {a, b};
}

}  // namespace specid::testing
