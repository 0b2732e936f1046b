#include "specid/error.hpp"

namespace specid {

namespace {

std::string with_line(const std::string& what, std::size_t line) {
  if (line == 0) return what;
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

FormatError::FormatError(const std::string& what, std::size_t line)
    : Error(with_line(what, line)), line_(line) {}

PeakCountMismatch::PeakCountMismatch(std::size_t record_index,
                                     std::size_t declared, std::size_t parsed,
                                     std::size_t line)
    : FormatError("record " + std::to_string(record_index) + ": Num Peaks " +
                      std::to_string(declared) + " but " +
                      std::to_string(parsed) + " peaks parsed",
                  line),
      record_index_(record_index),
      declared_(declared),
      parsed_(parsed) {}

SmilesSyntaxError::SmilesSyntaxError(const std::string& what,
                                     std::size_t offset)
    : Error("SMILES syntax error at offset " + std::to_string(offset) + ": " +
            what),
      offset_(offset) {}

UnparseableSmiles::UnparseableSmiles(std::size_t index,
                                     const std::string& smiles,
                                     const std::string& reason)
    : Error("item " + std::to_string(index) + ": cannot parse SMILES '" +
            smiles + "': " + reason),
      index_(index) {}

}  // namespace specid
