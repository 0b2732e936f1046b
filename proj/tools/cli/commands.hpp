#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace specid::cli {

namespace fs = std::filesystem;

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kConfigError = 2;

struct Context {
  RunConfig config;
  unsigned threads = 1;
  std::ostream* out = nullptr;  ///< summaries
  std::ostream* err = nullptr;  ///< diagnostics
};

struct ConvertArgs {
  fs::path input;
  fs::path output;
};

struct PrepareArgs {
  fs::path input;
  fs::path output;
  std::optional<fs::path> rejects;  ///< CSV log, default <output>.rejects.csv
  std::optional<fs::path> encoded;  ///< JSONL with m/z ids and bin ids
  std::optional<fs::path> tokenizer;  ///< adds token ids to the encoded output
  std::string default_source = "nist";
};

struct FitBinsArgs {
  fs::path input;
  int num_bins = 30;
  std::optional<fs::path> histogram;
};

struct TokenizeArgs {
  fs::path corpus;  ///< .msp/.jsonl records, otherwise one SMILES per line
  int min_frequency = 2;
  fs::path output;
  std::size_t max_merges = 0;
};

struct SplitArgs {
  fs::path input;
  fs::path out_dir;
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct IndexArgs {
  fs::path input;
  fs::path output;
};

struct SearchArgs {
  fs::path queries;
  fs::path library;
  std::string method = "sss";
  std::size_t k = 10;
  std::optional<fs::path> output;  ///< CSV, default stdout
  bool leave_one_out = false;  ///< skip entries with the query's compound
  /// Re-weights the library; otherwise the index weights apply.
  std::optional<search::SimilarityWeights> weights;
};

struct EvaluateArgs {
  /// "name=path" or plain path (method named after the file stem).
  std::vector<std::string> predictions;
  fs::path truth;
  std::optional<fs::path> csv;
  bool strict = false;
};

/// Each command returns an exit code; library errors are mapped by run().
int cmd_convert(const ConvertArgs& a, const Context& ctx);
int cmd_prepare(const PrepareArgs& a, const Context& ctx);
int cmd_fit_bins(const FitBinsArgs& a, const Context& ctx);
int cmd_tokenize(const TokenizeArgs& a, const Context& ctx);
int cmd_split(const SplitArgs& a, const Context& ctx);
int cmd_index(const IndexArgs& a, const Context& ctx);
int cmd_search(const SearchArgs& a, const Context& ctx);
int cmd_evaluate(const EvaluateArgs& a, const Context& ctx);

/// Calls fn and maps ConfigError to 2 and other errors to 1, printing the
/// message (with location when known) to ctx.err.
template <class Fn>
int run(const Context& ctx, Fn&& fn);

int report_exception(const Context& ctx);

template <class Fn>
int run(const Context& ctx, Fn&& fn) {
  try {
    return fn();
  } catch (...) {
    return report_exception(ctx);
  }
}

}  // namespace specid::cli
