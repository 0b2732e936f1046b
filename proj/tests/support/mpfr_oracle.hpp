// High-precision reference for the log binning formula.
#pragma once

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <deque>

namespace specid::testing {

/// n = max(floor(ln(i) / ln(b)) + s, 0) in 256-bit arithmetic, with i and b
/// taken as the exact binary doubles the library sees.
class MpfrBinning {
 public:
  MpfrBinning() { mpfr_inits2(256, log_i_, q_, nullptr); }
  ~MpfrBinning() {
    mpfr_clears(log_i_, q_, nullptr);
    for (auto& c : cache_) mpfr_clear(c.log_b);
  }
  MpfrBinning(const MpfrBinning&) = delete;
  MpfrBinning& operator=(const MpfrBinning&) = delete;

  /// Keeps ln(i) so several configurations can share it.
  void set_intensity(double i) {
    mpfr_set_d(q_, i, MPFR_RNDN);
    mpfr_log(log_i_, q_, MPFR_RNDN);
  }

  int bin(double base, int shift) {
    mpfr_div(q_, log_i_, log_base(base), MPFR_RNDN);
    mpfr_floor(q_, q_);
    const long f = mpfr_get_si(q_, MPFR_RNDN);
    return static_cast<int>(std::max(f + shift, 0L));
  }

  int bin(double i, double base, int shift) {
    set_intensity(i);
    return bin(base, shift);
  }

 private:
  struct Cached {
    double base;
    mpfr_t log_b;
  };

  mpfr_srcptr log_base(double base) {
    for (auto& c : cache_)
      if (c.base == base) return c.log_b;
    auto& c = cache_.emplace_back();  // deque: addresses stay valid
    c.base = base;
    mpfr_init2(c.log_b, 256);
    mpfr_set_d(q_, base, MPFR_RNDN);
    mpfr_log(c.log_b, q_, MPFR_RNDN);
    return c.log_b;
  }

  mpfr_t log_i_, q_;
  std::deque<Cached> cache_;
};

}  // namespace specid::testing
