#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "specid/spectra_io.hpp"

namespace specid::tok {

enum SpecialId : int {
  kPad = 0,
  kBos = 1,
  kEos = 2,
  kUnk = 3,
  kNist = 4,
  kNeims = 5,
  kRassp = 6,
  // 7..10 reserved
};

inline constexpr int kSpecialCount = 11;
inline constexpr int kByteBase = kSpecialCount;  ///< id of byte 0x00
inline constexpr int kCharLevelSize = kSpecialCount + 256;

/// Names of the 11 special tokens in id order.
std::span<const std::string_view> special_names();

/// Dense id space: specials, then the 256 single bytes, then one token per
/// merge in training order.
class Vocabulary {
 public:
  /// Specials and bytes only.
  Vocabulary();

  std::size_t size() const noexcept { return tokens_.size(); }
  bool is_special(int id) const noexcept { return id >= 0 && id < kSpecialCount; }
  /// Byte content of a non-special token; throws UnknownToken.
  const std::string& bytes(int id) const;
  /// "<bos>" etc. for specials, hex bytes otherwise.
  std::string display(int id) const;
  static int byte_id(unsigned char b) noexcept { return kByteBase + b; }

  /// Appends the concatenation of two existing tokens; returns its id.
  int add_merged(int left, int right);

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  std::vector<std::string> tokens_;  // empty for specials
};

struct BpeModel {
  std::vector<std::pair<int, int>> merges;  ///< merges[r] creates id kCharLevelSize + r
  int min_frequency = 1;

  friend bool operator==(const BpeModel&, const BpeModel&) = default;
};

struct Tokenizer {
  Vocabulary vocab;
  BpeModel model;

  friend bool operator==(const Tokenizer&, const Tokenizer&) = default;
};

struct TrainOptions {
  int min_frequency = 2;
  std::size_t max_merges = 0;  ///< 0 = until no pair reaches min_frequency
};

/// Byte-level BPE. Each step merges the most frequent adjacent pair (counts
/// summed over the corpus, never across string boundaries) whose count is at
/// least min_frequency; ties go to the lexicographically smallest
/// (left bytes, right bytes). When `segmentations` is given it receives the
/// final token ids of every corpus string, in corpus order.
/// Throws EmptyCorpus, ConfigError for min_frequency < 1.
Tokenizer train_bpe(std::span<const std::string> corpus, const TrainOptions& options,
                    std::vector<std::vector<int>>* segmentations = nullptr);
Tokenizer train_bpe(std::span<const std::string> corpus, int min_frequency);

/// Tokenizer with no merges.
Tokenizer char_level();

/// Token ids of `text` without specials: merges are replayed in rank order.
std::vector<int> segment(std::string_view text, const Vocabulary& vocab, const BpeModel& model);

/// Special token for a source; throws UnknownSource for other/unspecified.
int source_token(const io::Source& source);

/// [bos, source token, tokens..., eos].
std::vector<int> encode(std::string_view text, const Vocabulary& vocab, const BpeModel& model,
                        const io::Source& source);

/// Concatenated bytes of all non-special ids. Throws UnknownToken.
std::string decode(std::span<const int> ids, const Vocabulary& vocab);

/// Plain-text format: header line, one token per line (specials by name,
/// others hex), "#merges", then one "left_id right_id" pair per line.
void save(const Tokenizer& t, std::ostream& out);
/// Throws FormatError when the file is malformed or inconsistent.
Tokenizer load(std::istream& in);

}  // namespace specid::tok
