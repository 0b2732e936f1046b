#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specid/fingerprint.hpp"
#include "specid/preprocess.hpp"
#include "specid/spectra_io.hpp"

namespace specid::search {

/// Peak weight intensity^a * mz^c.
struct SimilarityWeights {
  double a = 0.6;
  double c = 3.0;

  void validate() const;
  friend bool operator==(const SimilarityWeights&, const SimilarityWeights&) = default;
};

struct IndexOptions {
  SimilarityWeights weights;
  int fp_radius = chem::kDefaultRadius;
  std::size_t fp_width = chem::kDefaultWidth;
  /// Recorded in the index header; not applied by the search itself.
  preprocess::BinningConfig binning;
};

/// (integer m/z, weight) with weights L2-normalized, sorted by m/z.
struct WeightedPeak {
  int mz;
  double w;
};
using WeightedSpectrum = std::vector<WeightedPeak>;

/// Rounds m/z to integers (merging collisions), applies the weights and
/// L2-normalizes. Zero-intensity peaks are dropped; an all-zero result is empty.
WeightedSpectrum weigh(std::span<const io::Peak> peaks, const SimilarityWeights& weights);

struct LibraryEntry {
  std::string name;
  std::string smiles;  ///< canonical, stereo stripped
  int nominal_mass = 0;
  std::vector<io::Peak> peaks;
  WeightedSpectrum spectrum;
  chem::Fingerprint fingerprint;
};

struct ScoredCandidate {
  std::size_t index = 0;
  double score = 0.0;
  std::string smiles;

  friend bool operator==(const ScoredCandidate&, const ScoredCandidate&) = default;
};

/// Immutable after construction; all queries are const and thread-safe.
class SpectralLibrary {
 public:
  SpectralLibrary() = default;
  SpectralLibrary(std::vector<LibraryEntry> entries, IndexOptions options);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const LibraryEntry& entry(std::size_t i) const { return entries_[i]; }
  std::span<const LibraryEntry> entries() const noexcept { return entries_; }
  const IndexOptions& options() const noexcept { return options_; }
  /// Largest m/z over all entries, 0 when empty.
  int max_mz() const noexcept { return max_mz_; }

 private:
  std::vector<LibraryEntry> entries_;
  IndexOptions options_;
  int max_mz_ = 0;
};

/// Every record needs parseable SMILES (UnparseableSmiles with the record
/// index otherwise). The entry mass is the record's MW when present, else the
/// nominal mass of the structure.
SpectralLibrary build_index(std::span<const io::SpectrumRecord> records,
                            const IndexOptions& options = {});

/// Copy of `lib` with spectra re-weighted from the stored peaks.
SpectralLibrary with_weights(const SpectralLibrary& lib, const SimilarityWeights& weights);

/// Cosine over equal integer m/z of the weighted query and each entry,
/// accumulated in ascending query m/z. Throws EmptyQuery.
std::vector<double> sss_scores(std::span<const io::Peak> query, const SpectralLibrary& lib);

/// Like sss_scores, but with delta = entry mass - query mass each query peak
/// at m takes the larger of its direct product (m) and its shifted product
/// (m + delta). Shifted positions outside [1, library max m/z] score 0.
/// Scores are clamped to [0, 1] since one entry peak can be matched twice.
std::vector<double> hss_scores(std::span<const io::Peak> query, std::optional<int> query_mass,
                               const SpectralLibrary& lib);

/// Tanimoto of the query structure against every entry.
std::vector<double> bdc_scores(std::string_view query_smiles, const SpectralLibrary& lib);

/// Top k by descending score, ties by ascending library index.
std::vector<ScoredCandidate> top_k(std::span<const double> scores, const SpectralLibrary& lib,
                                   std::size_t k);
/// Same, leaving out entries for which skip(index) is true.
std::vector<ScoredCandidate> top_k(std::span<const double> scores, const SpectralLibrary& lib,
                                   std::size_t k, const std::function<bool(std::size_t)>& skip);

std::vector<ScoredCandidate> sss(std::span<const io::Peak> query, const SpectralLibrary& lib,
                                 std::size_t k);
std::vector<ScoredCandidate> hss(std::span<const io::Peak> query, std::optional<int> query_mass,
                                 const SpectralLibrary& lib, std::size_t k);
std::vector<ScoredCandidate> bdc(std::string_view query_smiles, const SpectralLibrary& lib,
                                 std::size_t k);

/// JSON lines: a header object (format, version, weights, binning,
/// fingerprint), then one line per entry (name, smiles, mw, peaks).
void save_index(const SpectralLibrary& lib, std::ostream& out);
void save_index(const SpectralLibrary& lib, const std::filesystem::path& path);
/// Validates the header; throws FormatError with a line number.
SpectralLibrary load_index(std::istream& in);
SpectralLibrary load_index(const std::filesystem::path& path);

}  // namespace specid::search
