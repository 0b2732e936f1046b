#include "specid/evaluate.hpp"

#include <algorithm>
#include <array>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "specid/error.hpp"
#include "specid/parallel.hpp"
#include "specid/smiles.hpp"
#include "specid/spectra_io.hpp"

namespace specid::eval {

FingerprintTable::FingerprintTable(std::span<const PredictionSet* const> sets, const EvalOptions& options)
    : options_(options) {
  for (const auto* set : sets)
    for (const auto& p : *set) {
      add(p.truth);
      for (const auto& c : p.candidates) add(c);
    }
}

FingerprintTable::FingerprintTable(const PredictionSet& set, const EvalOptions& options)
    : FingerprintTable(std::span<const PredictionSet* const>(std::array{&set}.data(), 1), options) {}

void FingerprintTable::add(const std::string& smiles) {
  if (table_.count(smiles)) return;
  std::optional<chem::Fingerprint> fp;
  try {
    fp = chem::morgan_fingerprint(chem::parse_smiles(smiles), options_.fp_radius, options_.fp_width);
  } catch (const Error&) {
  }
  table_.emplace(smiles, std::move(fp));
}

const chem::Fingerprint* FingerprintTable::find(const std::string& smiles) const {
  const auto& fp = table_.at(smiles);
  return fp ? &*fp : nullptr;
}

namespace {

std::span<const std::string> prefix(const std::vector<std::string>& v, std::size_t k) {
  return {v.data(), std::min(k, v.size())};
}

bool contains(std::span<const std::string> list, const std::string& s) {
  return std::find(list.begin(), list.end(), s) != list.end();
}

double best_of(std::span<const std::string> list, const std::string& truth,
               const FingerprintTable& fps, std::size_t query_index) {
  const auto* t = fps.find(truth);
  if (!t) throw UnparseableSmiles(query_index, truth, "ground truth does not parse");
  double best = 0.0;
  for (const auto& c : list) {
    const auto* f = fps.find(c);
    if (!f) {
      if (fps.options().strict) throw UnparseableSmiles(query_index, c, "candidate does not parse");
      continue;
    }
    best = std::max(best, chem::tanimoto(*t, *f));
  }
  return best;
}

void require_nonempty(const PredictionSet& p) {
  if (p.empty()) throw EmptyPredictionSet("prediction set has no queries");
}

void require_same_queries(const PredictionSet& a, const PredictionSet& b) {
  if (a.size() != b.size())
    throw QuerySetMismatch("prediction sets have " + std::to_string(a.size()) + " and " +
                           std::to_string(b.size()) + " queries");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].truth != b[i].truth)
      throw QuerySetMismatch("ground truth differs at query " + std::to_string(i));
}

double percent(std::size_t hits, std::size_t n) {
  return 100.0 * static_cast<double>(hits) / static_cast<double>(n);
}

// R from precomputed pieces.
int rank_value(double best_left, double best_right, bool exact_left, bool exact_right) {
  if (best_left > best_right) return 1;
  if (exact_left && !exact_right) return 1;
  return 0;
}

}  // namespace

double best_similarity(const Prediction& p, std::size_t k, const FingerprintTable& fps,
                       std::size_t query_index) {
  return best_of(prefix(p.candidates, k), p.truth, fps, query_index);
}

double acc_k(const PredictionSet& preds, std::size_t k) {
  require_nonempty(preds);
  std::size_t hits = 0;
  for (const auto& p : preds)
    if (contains(prefix(p.candidates, k), p.truth)) ++hits;
  return percent(hits, preds.size());
}

double sim_k(const PredictionSet& preds, std::size_t k, const FingerprintTable& fps) {
  require_nonempty(preds);
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) sum += best_similarity(preds[i], k, fps, i);
  return sum / static_cast<double>(preds.size());
}

double sim_k(const PredictionSet& preds, std::size_t k, const EvalOptions& options) {
  return sim_k(preds, k, FingerprintTable(preds, options));
}

int rank_better(std::span<const std::string> left, std::span<const std::string> right,
                const std::string& truth, const FingerprintTable& fps, std::size_t query_index) {
  return rank_value(best_of(left, truth, fps, query_index), best_of(right, truth, fps, query_index),
                    contains(left, truth), contains(right, truth));
}

namespace {

FingerprintTable pair_table(const PredictionSet& a, const PredictionSet& b, const EvalOptions& o) {
  const std::array<const PredictionSet*, 2> sets{&a, &b};
  return FingerprintTable(sets, o);
}

std::size_t wins(const PredictionSet& a, const PredictionSet& b, std::size_t k,
                 const FingerprintTable& fps) {
  std::size_t w = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    w += static_cast<std::size_t>(
        rank_better(prefix(a[i].candidates, k), prefix(b[i].candidates, k), a[i].truth, fps, i));
  return w;
}

}  // namespace

double win_rate(const PredictionSet& a, const PredictionSet& b, std::size_t k,
                const FingerprintTable& fps) {
  require_nonempty(a);
  require_same_queries(a, b);
  return percent(wins(a, b, k, fps), a.size());
}

double win_rate(const PredictionSet& a, const PredictionSet& b, std::size_t k,
                const EvalOptions& options) {
  return win_rate(a, b, k, pair_table(a, b, options));
}

double alag(const PredictionSet& a, const PredictionSet& b, std::size_t k,
            const FingerprintTable& fps) {
  return 100.0 - win_rate(b, a, k, fps);
}

double alag(const PredictionSet& a, const PredictionSet& b, std::size_t k,
            const EvalOptions& options) {
  return alag(a, b, k, pair_table(a, b, options));
}

double draw_rate(const PredictionSet& a, const PredictionSet& b, std::size_t k,
                 const FingerprintTable& fps) {
  require_nonempty(a);
  require_same_queries(a, b);
  std::size_t draws = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto l = prefix(a[i].candidates, k);
    const auto r = prefix(b[i].candidates, k);
    if (rank_better(l, r, a[i].truth, fps, i) == 0 && rank_better(r, l, a[i].truth, fps, i) == 0)
      ++draws;
  }
  return percent(draws, a.size());
}

double draw_rate(const PredictionSet& a, const PredictionSet& b, std::size_t k,
                 const EvalOptions& options) {
  return draw_rate(a, b, k, pair_table(a, b, options));
}

// ---------------------------------------------------------------------------
// Reports

MetricReport evaluate(std::span<const NamedPredictions> methods, std::span<const std::size_t> ks,
                      const EvalOptions& options) {
  if (methods.empty()) throw EmptyPredictionSet("no prediction sets to evaluate");
  std::vector<const PredictionSet*> sets;
  for (const auto& m : methods) {
    require_nonempty(m.predictions);
    require_same_queries(methods.front().predictions, m.predictions);
    sets.push_back(&m.predictions);
  }
  const FingerprintTable fps(sets, options);
  const std::size_t n = methods.front().predictions.size();
  const std::size_t nm = methods.size();

  MetricReport report;
  for (const auto& m : methods) report.methods.push_back(m.method);
  report.ks.assign(ks.begin(), ks.end());

  // best[m][q] and exact[m][q] per k
  std::vector<std::vector<double>> best(nm, std::vector<double>(n));
  std::vector<std::vector<char>> exact(nm, std::vector<char>(n));
  std::vector<std::vector<MethodRow>> rows(nm);
  for (std::size_t k : ks) {
    for (std::size_t m = 0; m < nm; ++m) {
      const auto& preds = methods[m].predictions;
      parallel_for(n, options.threads, [&](std::size_t q) {
        best[m][q] = best_similarity(preds[q], k, fps, q);
        exact[m][q] = contains(prefix(preds[q].candidates, k), preds[q].truth) ? 1 : 0;
      });
    }
    for (std::size_t m = 0; m < nm; ++m) {
      MethodRow row;
      row.method = methods[m].method;
      row.k = k;
      std::size_t hits = 0;
      double sum = 0.0;
      for (std::size_t q = 0; q < n; ++q) {
        hits += static_cast<std::size_t>(exact[m][q]);
        sum += best[m][q];
      }
      row.acc = percent(hits, n);
      row.sim = sum / static_cast<double>(n);
      for (std::size_t o = 0; o < nm; ++o) {
        if (o == m) continue;
        std::size_t w = 0, l = 0;
        for (std::size_t q = 0; q < n; ++q) {
          w += static_cast<std::size_t>(rank_value(best[m][q], best[o][q], exact[m][q], exact[o][q]));
          l += static_cast<std::size_t>(rank_value(best[o][q], best[m][q], exact[o][q], exact[m][q]));
        }
        const auto& other = methods[o].method;
        row.win[other] = percent(w, n);
        row.alag[other] = 100.0 - percent(l, n);
        row.draw[other] = percent(n - w - l, n);
      }
      rows[m].push_back(std::move(row));
    }
  }
  for (auto& r : rows)
    for (auto& row : r) report.rows.push_back(std::move(row));
  return report;
}

void write_report_csv(const MetricReport& report, std::ostream& out) {
  out << "method,k,acc,sim";
  for (const auto& m : report.methods) out << ",win_vs_" << m;
  for (const auto& m : report.methods) out << ",alag_vs_" << m;
  for (const auto& m : report.methods) out << ",draw_vs_" << m;
  out << '\n';
  auto cell = [&](const std::map<std::string, double>& values, const std::string& m) {
    out << ',';
    if (auto it = values.find(m); it != values.end()) out << io::format_number(it->second);
  };
  for (const auto& row : report.rows) {
    out << row.method << ',' << row.k << ',' << io::format_number(row.acc) << ','
        << io::format_number(row.sim);
    for (const auto& m : report.methods) cell(row.win, m);
    for (const auto& m : report.methods) cell(row.alag, m);
    for (const auto& m : report.methods) cell(row.draw, m);
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("bad number '" + s + "'", line);
  }
}

}  // namespace

MetricReport read_report_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  bool got = false;
  while ((got = static_cast<bool>(std::getline(in, line))) && !line.empty() && line[0] == '#') ++line_no;
  if (!got) throw FormatError("empty report", line_no);
  const auto header = split_csv(line);
  if (header.size() < 4 || header[0] != "method" || header[1] != "k" || header[2] != "acc" ||
      header[3] != "sim" || (header.size() - 4) % 3 != 0)
    throw FormatError("unexpected report header", line_no);
  MetricReport report;
  const std::size_t nm = (header.size() - 4) / 3;
  for (std::size_t i = 0; i < nm; ++i) {
    const auto& h = header[4 + i];
    if (h.rfind("win_vs_", 0) != 0) throw FormatError("unexpected column " + h, line_no);
    report.methods.push_back(h.substr(7));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw FormatError("wrong number of columns", line_no);
    MethodRow row;
    row.method = cells[0];
    row.k = static_cast<std::size_t>(parse_double(cells[1], line_no));
    row.acc = parse_double(cells[2], line_no);
    row.sim = parse_double(cells[3], line_no);
    for (std::size_t i = 0; i < nm; ++i) {
      const auto& m = report.methods[i];
      if (!cells[4 + i].empty()) row.win[m] = parse_double(cells[4 + i], line_no);
      if (!cells[4 + nm + i].empty()) row.alag[m] = parse_double(cells[4 + nm + i], line_no);
      if (!cells[4 + 2 * nm + i].empty()) row.draw[m] = parse_double(cells[4 + 2 * nm + i], line_no);
    }
    if (std::find(report.ks.begin(), report.ks.end(), row.k) == report.ks.end())
      report.ks.push_back(row.k);
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_report_text(const MetricReport& report, std::ostream& out) {
  std::size_t width = 6;
  for (const auto& m : report.methods) width = std::max(width, m.size());
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::left << std::setw(static_cast<int>(width)) << "method" << std::right << std::setw(5)
      << "k" << std::setw(9) << "Acc" << std::setw(8) << "Sim";
  for (const auto& m : report.methods) out << "  " << std::setw(static_cast<int>(width) + 12) << ("Win/ALAG " + m);
  out << '\n';
  out << std::fixed;
  for (const auto& row : report.rows) {
    out << std::left << std::setw(static_cast<int>(width)) << row.method << std::right << std::setw(5)
        << row.k << std::setprecision(1) << std::setw(9) << row.acc << std::setprecision(3)
        << std::setw(8) << row.sim;
    for (const auto& m : report.methods) {
      std::ostringstream cell;
      if (auto it = row.win.find(m); it != row.win.end())
        cell << std::fixed << std::setprecision(1) << it->second << " / " << row.alag.at(m);
      else
        cell << "-";
      out << "  " << std::setw(static_cast<int>(width) + 12) << cell.str();
    }
    out << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace specid::eval
