// Independent reference scoring for the library search tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "specid/search.hpp"
#include "specid/spectra_io.hpp"

namespace specid::testing {

/// m/z -> normalized weight, built without the library's helpers.
inline std::map<int, double> reference_weights(const std::vector<io::Peak>& peaks, double a, double c) {
  std::map<int, double> merged;
  for (const auto& p : peaks)
    if (p.intensity > 0) merged[static_cast<int>(std::floor(p.mz + 0.5))] += p.intensity;
  std::map<int, double> w;
  double norm = 0;
  for (const auto& [mz, in] : merged) {
    const double x = std::pow(in, a) * std::pow(mz, c);
    if (x > 0) {
      w[mz] = x;
      norm += x * x;
    }
  }
  for (auto& [mz, x] : w) x /= std::sqrt(norm);
  return w;
}

inline double reference_cosine(const std::map<int, double>& q, const std::map<int, double>& e) {
  double s = 0;
  for (const auto& [mz, w] : q) {
    const auto it = e.find(mz);
    if (it != e.end()) s += w * it->second;
  }
  return std::clamp(s, 0.0, 1.0);
}

/// Maximum over all 2^p direct/shifted choices per query peak.
inline double reference_hybrid(const std::map<int, double>& q, const std::map<int, double>& e, int delta,
                               int max_mz) {
  std::vector<std::pair<int, double>> peaks(q.begin(), q.end());
  const std::size_t p = peaks.size();
  double best = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
    double s = 0;
    for (std::size_t k = 0; k < p; ++k) {
      int at = peaks[k].first;
      if (mask >> k & 1U) {
        at += delta;
        if (at < 1 || at > max_mz) continue;
      }
      const auto it = e.find(at);
      if (it != e.end()) s += peaks[k].second * it->second;
    }
    best = std::max(best, std::clamp(s, 0.0, 1.0));
  }
  return best;
}

/// Indices sorted by descending score, ties by index.
inline std::vector<std::size_t> reference_ranking(const std::vector<double>& scores) {
  std::vector<std::size_t> idx(scores.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });
  return idx;
}

}  // namespace specid::testing
