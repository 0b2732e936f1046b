#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "specid/fingerprint.hpp"

namespace specid::eval {

/// Ground truth and ranked candidates for one query. All strings are expected
/// to be canonical SMILES; exact match is string equality.
struct Prediction {
  std::string truth;
  std::vector<std::string> candidates;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

using PredictionSet = std::vector<Prediction>;

struct EvalOptions {
  int fp_radius = chem::kDefaultRadius;
  std::size_t fp_width = chem::kDefaultWidth;
  /// Unparseable candidates throw instead of scoring 0.
  bool strict = false;
  unsigned threads = 1;
};

/// Read-only SMILES -> fingerprint table built before scoring; unparseable
/// strings map to nullopt.
class FingerprintTable {
 public:
  FingerprintTable() = default;
  FingerprintTable(std::span<const PredictionSet* const> sets, const EvalOptions& options);
  explicit FingerprintTable(const PredictionSet& set, const EvalOptions& options = {});

  /// nullptr when the string did not parse. Strings not in the table are an
  /// invariant violation (std::out_of_range).
  const chem::Fingerprint* find(const std::string& smiles) const;

  const EvalOptions& options() const noexcept { return options_; }

 private:
  void add(const std::string& smiles);

  EvalOptions options_;
  std::unordered_map<std::string, std::optional<chem::Fingerprint>> table_;
};

/// Highest Tanimoto between the truth and the first k candidates; 0 for an
/// empty list. Unparseable truth throws UnparseableSmiles(query_index);
/// unparseable candidates score 0 unless the table's options are strict.
double best_similarity(const Prediction& p, std::size_t k, const FingerprintTable& fps,
                       std::size_t query_index = 0);

/// Percentage of queries whose truth is among the first k candidates.
/// Throws EmptyPredictionSet.
double acc_k(const PredictionSet& preds, std::size_t k);

/// Mean best_similarity over queries. Throws EmptyPredictionSet.
double sim_k(const PredictionSet& preds, std::size_t k, const FingerprintTable& fps);
double sim_k(const PredictionSet& preds, std::size_t k, const EvalOptions& options = {});

/// 1 when the left list has strictly higher best similarity, or contains the
/// truth while the right one does not; 0 otherwise. Both lists are used whole.
int rank_better(std::span<const std::string> left, std::span<const std::string> right,
                const std::string& truth, const FingerprintTable& fps, std::size_t query_index = 0);

/// Percentage of queries where `a` is strictly better than `b` on the first k
/// candidates. Throws QuerySetMismatch when sizes or truths differ.
double win_rate(const PredictionSet& a, const PredictionSet& b, std::size_t k,
                const FingerprintTable& fps);
double win_rate(const PredictionSet& a, const PredictionSet& b, std::size_t k,
                const EvalOptions& options = {});

/// 100 - win_rate(b, a).
double alag(const PredictionSet& a, const PredictionSet& b, std::size_t k,
            const FingerprintTable& fps);
double alag(const PredictionSet& a, const PredictionSet& b, std::size_t k,
            const EvalOptions& options = {});

/// Percentage of queries where neither side is strictly better.
double draw_rate(const PredictionSet& a, const PredictionSet& b, std::size_t k,
                 const FingerprintTable& fps);
double draw_rate(const PredictionSet& a, const PredictionSet& b, std::size_t k,
                 const EvalOptions& options = {});

struct MethodRow {
  std::string method;
  std::size_t k = 0;
  double acc = 0.0;
  double sim = 0.0;
  /// Keyed by the other method's name.
  std::map<std::string, double> win;
  std::map<std::string, double> alag;
  std::map<std::string, double> draw;

  friend bool operator==(const MethodRow&, const MethodRow&) = default;
};

struct MetricReport {
  std::vector<std::string> methods;
  std::vector<std::size_t> ks;
  std::vector<MethodRow> rows;  ///< method-major, then k in the given order

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

struct NamedPredictions {
  std::string method;
  PredictionSet predictions;
};

/// Acc/Sim for every method and k, plus win/ALAG/draw for every ordered pair
/// of distinct methods. Per-query work runs on options.threads workers.
MetricReport evaluate(std::span<const NamedPredictions> methods, std::span<const std::size_t> ks,
                      const EvalOptions& options = {});

void write_report_csv(const MetricReport& report, std::ostream& out);
/// Inverse of write_report_csv; throws FormatError.
MetricReport read_report_csv(std::istream& in);
void write_report_text(const MetricReport& report, std::ostream& out);

}  // namespace specid::eval
