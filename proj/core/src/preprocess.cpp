#include "specid/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "specid/error.hpp"
#include "specid/smiles.hpp"

namespace specid::preprocess {

using io::Peak;
using io::SpectrumRecord;

void BinningConfig::validate() const {
  if (!(base > 1.0) || !std::isfinite(base))
    throw ConfigError("binning base must be a finite value > 1");
  if (shift < 1) throw ConfigError("binning needs at least 2 bins (shift >= 1)");
}

void FilterConfig::validate() const {
  if (max_peaks <= 0 || max_mz <= 0 || max_smiles_len <= 0)
    throw ConfigError("filter limits must be positive");
}

std::vector<Peak> normalize(std::span<const Peak> peaks) {
  double top = 0.0;
  for (const auto& p : peaks) top = std::max(top, p.intensity);
  if (!(top > 0.0)) throw AllZeroIntensities("spectrum has no positive intensity");
  std::vector<Peak> out(peaks.begin(), peaks.end());
  for (auto& p : out) p.intensity = p.intensity == top ? 1.0 : p.intensity / top;
  return out;
}

SpectrumRecord normalize(SpectrumRecord record) {
  record.peaks = normalize(record.peaks);
  return record;
}

std::vector<Peak> merge_rounded(std::span<const Peak> peaks) {
  std::map<double, double> merged;
  for (const auto& p : peaks) merged[std::floor(p.mz + 0.5)] += p.intensity;
  std::vector<Peak> out;
  out.reserve(merged.size());
  for (const auto& [mz, in] : merged)
    if (in > 0.0) out.push_back({mz, in});
  return out;
}

std::vector<Peak> round_mz(std::span<const Peak> peaks) {
  auto out = merge_rounded(peaks);
  if (out.empty()) return out;
  return normalize(out);
}

SpectrumRecord round_mz(SpectrumRecord record) {
  record.peaks = round_mz(record.peaks);
  return record;
}

namespace {

int bin_from_log(long double log_i, long double log_b, int shift) {
  const long double n = std::floor(log_i / log_b) + static_cast<long double>(shift);
  return n < 0 ? 0 : static_cast<int>(n);
}

void check_intensity(double i) {
  if (!(i > 0.0) || !(i <= 1.0))
    throw DomainError("intensity must lie in (0, 1], got " + io::format_number(i));
}

}  // namespace

int bin_intensity(double i, const BinningConfig& cfg) {
  check_intensity(i);
  if (i == 1.0) return cfg.shift;
  return bin_from_log(std::log(static_cast<long double>(i)),
                      std::log(static_cast<long double>(cfg.base)), cfg.shift);
}

std::vector<std::size_t> bin_histogram(std::span<const double> intensities,
                                       const BinningConfig& cfg) {
  std::vector<std::size_t> h(static_cast<std::size_t>(cfg.num_bins()), 0);
  for (double i : intensities) ++h[static_cast<std::size_t>(bin_intensity(i, cfg))];
  return h;
}

namespace {

double chi_square(const std::vector<std::size_t>& hist, std::size_t total) {
  const double expected = static_cast<double>(total) / static_cast<double>(hist.size());
  double chi = 0.0;
  for (auto c : hist) {
    const double d = static_cast<double>(c) - expected;
    chi += d * d / expected;
  }
  return chi;
}

class Objective {
 public:
  Objective(std::span<const double> sample, int num_bins)
      : shift_(num_bins - 1), hist_(static_cast<std::size_t>(num_bins)) {
    logs_.reserve(sample.size());
    for (double i : sample) {
      check_intensity(i);
      logs_.push_back(std::log(static_cast<long double>(i)));
    }
  }

  double operator()(double base) {
    std::fill(hist_.begin(), hist_.end(), 0);
    const long double lb = std::log(static_cast<long double>(base));
    for (auto li : logs_) ++hist_[static_cast<std::size_t>(li == 0 ? shift_ : bin_from_log(li, lb, shift_))];
    return chi_square(hist_, logs_.size());
  }

 private:
  int shift_;
  std::vector<long double> logs_;
  std::vector<std::size_t> hist_;
};

constexpr double kBaseLow = 1.01;
constexpr double kBaseHigh = 4.0;
constexpr int kGridPoints = 600;

}  // namespace

double binning_chi_square(std::span<const double> intensities, const BinningConfig& cfg) {
  cfg.validate();
  return chi_square(bin_histogram(intensities, cfg), intensities.size());
}

BinningConfig fit_log_base(std::span<const double> intensities, int num_bins) {
  if (num_bins < 2) throw ConfigError("fit_log_base needs num_bins >= 2");
  if (intensities.size() < static_cast<std::size_t>(num_bins))
    throw InsufficientSample("sample of " + std::to_string(intensities.size()) +
                             " values is smaller than num_bins=" + std::to_string(num_bins));
  Objective f(intensities, num_bins);

  const double step = (kBaseHigh - kBaseLow) / kGridPoints;
  int best_k = 1;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= kGridPoints; ++k) {
    const double v = f(kBaseLow + step * k);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  double best_b = kBaseLow + step * best_k;

  // Golden-section search on the bracket around the grid minimizer.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = kBaseLow + step * std::max(best_k - 1, 0);
  double hi = std::min(kBaseLow + step * (best_k + 1), kBaseHigh);
  lo = std::max(lo, kBaseLow + 1e-9);
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > 1e-7) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = f(x2);
    }
  }
  const double refined = f1 <= f2 ? x1 : x2;
  if (f(refined) < best) best_b = refined;
  return {best_b, num_bins - 1};
}

std::string_view reason_name(RejectReason reason) {
  switch (reason) {
    case RejectReason::too_many_peaks: return "too_many_peaks";
    case RejectReason::mz_exceeds_limit: return "mz_exceeds_limit";
    case RejectReason::smiles_too_long: return "smiles_too_long";
    case RejectReason::unparseable_smiles: return "unparseable_smiles";
  }
  return "unknown";
}

FilterResult apply_filters(const SpectrumRecord& record, const FilterConfig& cfg) {
  if (record.peaks.size() > static_cast<std::size_t>(cfg.max_peaks))
    return FilterResult::rejected(RejectReason::too_many_peaks);
  for (const auto& p : record.peaks)
    if (p.mz > cfg.max_mz) return FilterResult::rejected(RejectReason::mz_exceeds_limit);
  if (record.smiles && record.smiles->size() > static_cast<std::size_t>(cfg.max_smiles_len))
    return FilterResult::rejected(RejectReason::smiles_too_long);
  if (!record.smiles || record.smiles->empty())
    return FilterResult::rejected(RejectReason::unparseable_smiles);
  try {
    (void)chem::parse_smiles(*record.smiles);
  } catch (const Error&) {
    return FilterResult::rejected(RejectReason::unparseable_smiles);
  }
  return FilterResult::kept();
}

SpectrumRecord prepare(SpectrumRecord record) {
  record.peaks = round_mz(normalize(record.peaks));
  return record;
}

EncodedSpectrum encode_model_input(const SpectrumRecord& record, const BinningConfig& cfg) {
  cfg.validate();
  EncodedSpectrum out;
  double last = -1.0;
  for (const auto& p : record.peaks) {
    if (p.intensity == 0.0) continue;
    if (p.mz != std::floor(p.mz) || p.mz <= last)
      throw DomainError("encode_model_input needs integer, strictly increasing m/z (got " +
                        io::format_number(p.mz) + ")");
    last = p.mz;
    out.mz_ids.push_back(static_cast<int>(p.mz));
    out.intensity_bin_ids.push_back(bin_intensity(p.intensity, cfg));
  }
  return out;
}

}  // namespace specid::preprocess
