#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "specid/spectra_io.hpp"

namespace specid::preprocess {

/// Logarithmic intensity binning: bin = max(floor(log_base(i)) + shift, 0).
struct BinningConfig {
  double base = 1.28;
  int shift = 29;

  int num_bins() const noexcept { return shift + 1; }
  /// Throws ConfigError unless base > 1 and num_bins >= 2.
  void validate() const;

  friend bool operator==(const BinningConfig&, const BinningConfig&) = default;
};

/// Inclusive limits.
struct FilterConfig {
  int max_peaks = 300;
  int max_mz = 500;
  int max_smiles_len = 100;

  void validate() const;
};

struct EncodedSpectrum {
  std::vector<int> mz_ids;
  std::vector<int> intensity_bin_ids;
};

/// Scales intensities so the maximum is exactly 1. Throws AllZeroIntensities
/// when no intensity is positive (including the empty spectrum).
std::vector<io::Peak> normalize(std::span<const io::Peak> peaks);
io::SpectrumRecord normalize(io::SpectrumRecord record);

/// Rounds m/z half-up to integers, sums intensities that land on the same
/// integer, drops zero-intensity peaks and re-normalizes to max 1. Output is
/// sorted by m/z.
std::vector<io::Peak> round_mz(std::span<const io::Peak> peaks);
io::SpectrumRecord round_mz(io::SpectrumRecord record);

/// Same as round_mz without the final re-normalization.
std::vector<io::Peak> merge_rounded(std::span<const io::Peak> peaks);

/// Throws DomainError unless 0 < i <= 1.
int bin_intensity(double i, const BinningConfig& cfg);

/// Count of sample values per bin.
std::vector<std::size_t> bin_histogram(std::span<const double> intensities,
                                       const BinningConfig& cfg);

/// Chi-square distance of the bin histogram to the uniform histogram.
double binning_chi_square(std::span<const double> intensities, const BinningConfig& cfg);

/// Chooses the base for `num_bins` bins (shift = num_bins - 1) that spreads
/// the sample most evenly: a grid over (1.01, 4] followed by golden-section
/// refinement around the best grid point. Ties resolve to the smaller base.
/// Throws InsufficientSample when the sample has fewer than num_bins values,
/// DomainError for values outside (0, 1], ConfigError for num_bins < 2.
BinningConfig fit_log_base(std::span<const double> intensities, int num_bins);

enum class RejectReason { too_many_peaks, mz_exceeds_limit, smiles_too_long, unparseable_smiles };

std::string_view reason_name(RejectReason reason);

struct FilterResult {
  bool keep = true;
  RejectReason reason = RejectReason::too_many_peaks;  ///< meaningful when !keep

  static FilterResult kept() { return {}; }
  static FilterResult rejected(RejectReason r) { return {false, r}; }
};

/// First failing check in the order too_many_peaks, mz_exceeds_limit,
/// smiles_too_long, unparseable_smiles. A record without SMILES counts as
/// unparseable.
FilterResult apply_filters(const io::SpectrumRecord& record, const FilterConfig& cfg);

/// Normalize then round; the usual step before filtering and encoding.
io::SpectrumRecord prepare(io::SpectrumRecord record);

/// One (m/z id, bin id) pair per peak. Peaks must have integer, strictly
/// increasing m/z; zero-intensity peaks are skipped. Throws DomainError.
EncodedSpectrum encode_model_input(const io::SpectrumRecord& record, const BinningConfig& cfg);

}  // namespace specid::preprocess
