#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "specid/formula.hpp"

namespace specid::io {

struct Peak {
  double mz = 0.0;
  double intensity = 0.0;

  friend bool operator==(const Peak&, const Peak&) = default;
};

enum class SourceKind { nist, neims, rassp, other };

/// Origin of a spectrum. `other` with an empty label means "unspecified".
struct Source {
  SourceKind kind = SourceKind::other;
  std::string label;

  static Source nist() { return {SourceKind::nist, {}}; }
  static Source neims() { return {SourceKind::neims, {}}; }
  static Source rassp() { return {SourceKind::rassp, {}}; }
  static Source other(std::string label) {
    return {SourceKind::other, std::move(label)};
  }
  /// Case-insensitive match on nist/neims/rassp; anything else is other(text).
  static Source parse(std::string_view text);

  bool unspecified() const noexcept {
    return kind == SourceKind::other && label.empty();
  }
  /// "nist", "neims", "rassp" or the other-label.
  std::string name() const;

  friend bool operator==(const Source&, const Source&) = default;
};

struct SpectrumRecord {
  std::vector<Peak> peaks;
  std::string name;
  std::optional<std::string> smiles;
  std::optional<int> nominal_mass;
  std::optional<Formula> formula;
  Source source;
  /// Header keys the parser does not interpret, keyed by their original
  /// spelling.
  std::map<std::string, std::string> metadata;

  friend bool operator==(const SpectrumRecord&, const SpectrumRecord&) = default;
};

/// Stable ascending sort by m/z.
void sort_peaks(SpectrumRecord& record);

// ---------------------------------------------------------------------------
// MSP

/// Pull parser over an MSP stream; one record per call. Blocks are separated
/// by blank lines. Peak lines hold whitespace- or ';'-separated m/z intensity
/// pairs; quoted peak annotations are ignored.
class MspReader {
 public:
  explicit MspReader(std::istream& in);

  /// Next record, or nullopt at end of input. Throws MissingHeader,
  /// MalformedPeak or PeakCountMismatch.
  std::optional<SpectrumRecord> next();

  /// Non-fatal findings so far (duplicate header keys, skipped lines).
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  std::size_t records_read() const noexcept { return records_read_; }

 private:
  bool read_line(std::string& line);

  std::istream& in_;
  std::size_t line_no_ = 0;
  std::size_t records_read_ = 0;
  std::optional<std::string> lookahead_;
  std::vector<std::string> warnings_;
};

std::vector<SpectrumRecord> parse_msp(std::string_view text,
                                      std::vector<std::string>* warnings = nullptr);
std::vector<SpectrumRecord> parse_msp(std::istream& in,
                                      std::vector<std::string>* warnings = nullptr);

void write_msp_record(std::ostream& out, const SpectrumRecord& record);
std::string write_msp(std::span<const SpectrumRecord> records);

// ---------------------------------------------------------------------------
// Canonical line-delimited format (.jsonl): one JSON object per line with
// fields name, peaks ([[mz, intensity], ...]) and optional smiles, mw,
// formula ({"C": 7, ...}), source, meta.

std::string to_json_line(const SpectrumRecord& record);
/// `line_no` is reported in FormatError.
SpectrumRecord from_json_line(std::string_view line, std::size_t line_no = 0);

// ---------------------------------------------------------------------------
// Files

enum class FileFormat { msp, jsonl };

/// .msp -> msp; .jsonl/.ndjson -> jsonl; anything else throws FormatError.
FileFormat format_for_path(const std::filesystem::path& path);

/// Streaming reader; format from the file extension.
class RecordReader {
 public:
  explicit RecordReader(const std::filesystem::path& path);
  ~RecordReader();
  RecordReader(RecordReader&&) noexcept;
  RecordReader& operator=(RecordReader&&) noexcept;

  std::optional<SpectrumRecord> next();
  const std::vector<std::string>& warnings() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Streaming writer; format from the file extension. Flushes on close() or
/// destruction.
class RecordWriter {
 public:
  explicit RecordWriter(const std::filesystem::path& path);
  ~RecordWriter();
  RecordWriter(RecordWriter&&) noexcept;
  RecordWriter& operator=(RecordWriter&&) noexcept;

  void write(const SpectrumRecord& record);
  void close();
  std::size_t written() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<SpectrumRecord> read_records(const std::filesystem::path& path,
                                         std::vector<std::string>* warnings = nullptr);
void write_records(std::span<const SpectrumRecord> records,
                   const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

}  // namespace specid::io
