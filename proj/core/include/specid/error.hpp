#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specid {

/// Base for every error the library throws. Callers that only need a
/// message can catch this; tests and the CLI dispatch on the subclasses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- spectra_io ----

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; `line()` is 1-based, 0 when unknown.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class PeakCountMismatch : public FormatError {
 public:
  PeakCountMismatch(std::size_t record_index, std::size_t declared,
                    std::size_t parsed, std::size_t line);
  std::size_t record_index() const noexcept { return record_index_; }
  std::size_t declared() const noexcept { return declared_; }
  std::size_t parsed() const noexcept { return parsed_; }

 private:
  std::size_t record_index_;
  std::size_t declared_;
  std::size_t parsed_;
};

class MalformedPeak : public FormatError {
 public:
  using FormatError::FormatError;
};

class MissingHeader : public FormatError {
 public:
  using FormatError::FormatError;
};

// ---- chem ----

/// SMILES syntax error; `offset()` is the 0-based character position.
class SmilesSyntaxError : public Error {
 public:
  SmilesSyntaxError(const std::string& what, std::size_t offset);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ValenceError : public Error {
 public:
  using Error::Error;
};

class UnknownElement : public Error {
 public:
  using Error::Error;
};

class WidthMismatch : public Error {
 public:
  using Error::Error;
};

/// A record or query whose structure string does not parse. `index()` is the
/// position of the offending item in the caller's sequence.
class UnparseableSmiles : public Error {
 public:
  UnparseableSmiles(std::size_t index, const std::string& smiles,
                    const std::string& reason);
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// ---- preprocess ----

class AllZeroIntensities : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class InsufficientSample : public Error {
 public:
  using Error::Error;
};

// ---- tokenizer ----

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class UnknownSource : public Error {
 public:
  using Error::Error;
};

class UnknownToken : public Error {
 public:
  using Error::Error;
};

// ---- search ----

class EmptyQuery : public Error {
 public:
  using Error::Error;
};

class MissingMass : public Error {
 public:
  using Error::Error;
};

// ---- evaluate ----

class EmptyPredictionSet : public Error {
 public:
  using Error::Error;
};

class QuerySetMismatch : public Error {
 public:
  using Error::Error;
};

/// Invalid parameter combination (ratios, bin counts, widths...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace specid
