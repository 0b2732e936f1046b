#include "cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cli/csv.hpp"
#include "specid/chem.hpp"
#include "specid/curate.hpp"
#include "specid/error.hpp"
#include "specid/evaluate.hpp"
#include "specid/parallel.hpp"
#include "specid/preprocess.hpp"
#include "specid/search.hpp"
#include "specid/smiles.hpp"
#include "specid/spectra_io.hpp"
#include "specid/tokenizer.hpp"

namespace specid::cli {

namespace {

using io::SpectrumRecord;
using nlohmann::json;

std::ostream& out_of(const Context& ctx) { return ctx.out ? *ctx.out : std::cout; }
std::ostream& err_of(const Context& ctx) { return ctx.err ? *ctx.err : std::cerr; }

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw IoError("no such file: " + path.string());
}

std::string seed_tag(const Context& ctx) { return "seed=" + std::to_string(ctx.config.seed); }

void print_warnings(const Context& ctx, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err_of(ctx) << "warning: " << w << '\n';
}

search::IndexOptions index_options(const RunConfig& cfg) {
  search::IndexOptions o;
  o.weights = cfg.weights;
  o.binning = cfg.binning;
  o.fp_radius = cfg.fp_radius;
  o.fp_width = cfg.fp_width;
  return o;
}

}  // namespace

int report_exception(const Context& ctx) {
  auto& err = err_of(ctx);
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const FormatError& e) {
    err << "input error";
    if (e.line() > 0) err << " (line " << e.line() << ")";
    err << ": " << e.what() << '\n';
    return kInputError;
  } catch (const SmilesSyntaxError& e) {
    err << "input error (offset " << e.offset() << "): " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

// ---------------------------------------------------------------------------

int cmd_convert(const ConvertArgs& a, const Context& ctx) {
  require_file(a.input);
  (void)io::format_for_path(a.output);
  io::RecordReader reader(a.input);
  io::RecordWriter writer(a.output);
  while (auto r = reader.next()) writer.write(*r);
  writer.close();
  print_warnings(ctx, reader.warnings());
  out_of(ctx) << "converted " << writer.written() << " records " << a.input.string() << " -> "
              << a.output.string() << ' ' << seed_tag(ctx) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_prepare(const PrepareArgs& a, const Context& ctx) {
  const auto& cfg = ctx.config;
  require_file(a.input);
  (void)io::format_for_path(a.output);
  std::optional<tok::Tokenizer> tokenizer;
  if (a.tokenizer) {
    auto in = open_in(*a.tokenizer);
    tokenizer = tok::load(in);
  }
  const auto fallback_source = io::Source::parse(a.default_source);

  io::RecordReader reader(a.input);
  io::RecordWriter writer(a.output);
  auto rejects_path = a.rejects ? *a.rejects : fs::path(a.output.string() + ".rejects.csv");
  auto rejects = open_out(rejects_path);
  rejects << "# specid prepare " << seed_tag(ctx) << '\n' << "index,name,reason\n";
  std::optional<std::ofstream> encoded;
  if (a.encoded) encoded = open_out(*a.encoded);

  std::size_t total = 0;
  std::size_t rejected = 0;
  std::map<std::string, std::size_t> by_reason;
  while (auto rec = reader.next()) {
    const std::size_t index = total++;
    const std::string name = rec->name;
    std::string reason;
    SpectrumRecord r;
    try {
      r = preprocess::prepare(std::move(*rec));
    } catch (const AllZeroIntensities&) {
      reason = "all_zero_intensities";
    }
    if (reason.empty()) {
      const auto verdict = preprocess::apply_filters(r, cfg.filters);
      if (!verdict.keep) reason = preprocess::reason_name(verdict.reason);
    }
    if (!reason.empty()) {
      ++rejected;
      ++by_reason[reason];
      rejects << index << ',' << csv_field(name) << ',' << reason << '\n';
      continue;
    }
    r.smiles = chem::canonicalize(*r.smiles);
    writer.write(r);
    if (encoded) {
      const auto enc = preprocess::encode_model_input(r, cfg.binning);
      json line = {{"name", r.name}, {"mz", enc.mz_ids}, {"bins", enc.intensity_bin_ids}};
      if (tokenizer) {
        const auto& src = r.source.unspecified() ? fallback_source : r.source;
        line["tokens"] = tok::encode(*r.smiles, tokenizer->vocab, tokenizer->model, src);
      }
      *encoded << line.dump() << '\n';
    }
  }
  writer.close();
  print_warnings(ctx, reader.warnings());
  auto& out = out_of(ctx);
  out << "input " << total << " kept " << writer.written() << " rejected " << rejected << ' '
      << seed_tag(ctx) << '\n';
  for (const auto& [reason, n] : by_reason) out << "  " << reason << ' ' << n << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_fit_bins(const FitBinsArgs& a, const Context& ctx) {
  if (a.num_bins < 2) throw ConfigError("--bins must be at least 2");
  require_file(a.input);
  std::vector<double> sample;
  io::RecordReader reader(a.input);
  while (auto rec = reader.next()) {
    SpectrumRecord r;
    try {
      r = preprocess::prepare(std::move(*rec));
    } catch (const AllZeroIntensities&) {
      continue;
    }
    for (const auto& p : r.peaks)
      if (p.intensity > 0.0) sample.push_back(p.intensity);
  }
  const auto cfg = preprocess::fit_log_base(sample, a.num_bins);
  const auto hist = preprocess::bin_histogram(sample, cfg);
  out_of(ctx) << "base " << io::format_number(cfg.base) << " shift " << cfg.shift << " bins "
              << cfg.num_bins() << " chi2 " << io::format_number(preprocess::binning_chi_square(sample, cfg))
              << " values " << sample.size() << ' ' << seed_tag(ctx) << '\n';
  if (a.histogram) {
    auto out = open_out(*a.histogram);
    out << "# specid fit-bins base=" << io::format_number(cfg.base) << " shift=" << cfg.shift << ' '
        << seed_tag(ctx) << '\n';
    out << "bin,lower,upper,count\n";
    for (int n = 0; n < cfg.num_bins(); ++n) {
      const double lower = n == 0 ? 0.0 : std::pow(cfg.base, n - cfg.shift);
      const double upper = std::min(1.0, std::pow(cfg.base, n + 1 - cfg.shift));
      out << n << ',' << io::format_number(lower) << ',' << io::format_number(upper) << ','
          << hist[static_cast<std::size_t>(n)] << '\n';
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> read_corpus(const fs::path& path) {
  std::vector<std::string> corpus;
  const auto ext = path.extension().string();
  if (ext == ".msp" || ext == ".jsonl" || ext == ".ndjson") {
    io::RecordReader reader(path);
    while (auto r = reader.next())
      if (r->smiles) corpus.push_back(*r->smiles);
    return corpus;
  }
  auto in = open_in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) corpus.push_back(line);
  }
  return corpus;
}

}  // namespace

int cmd_tokenize(const TokenizeArgs& a, const Context& ctx) {
  require_file(a.corpus);
  if (a.min_frequency < 1) throw ConfigError("--min-frequency must be >= 1");
  const auto corpus = read_corpus(a.corpus);
  tok::TrainOptions opt;
  opt.min_frequency = a.min_frequency;
  opt.max_merges = a.max_merges;
  const auto t = tok::train_bpe(corpus, opt);
  auto out = open_out(a.output);
  tok::save(t, out);
  out_of(ctx) << "corpus " << corpus.size() << " min_frequency " << a.min_frequency << " merges "
              << t.model.merges.size() << " vocab " << t.vocab.size() << ' ' << seed_tag(ctx) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_split(const SplitArgs& a, const Context& ctx) {
  require_file(a.input);
  curate::SplitSpec spec{a.train, a.validation, a.test, ctx.config.seed};
  spec.validate();
  std::vector<std::string> warnings;
  const auto records = io::read_records(a.input, &warnings);
  print_warnings(ctx, warnings);
  const auto result = curate::split(records, spec, ctx.threads);
  auto ext = a.input.extension().string();
  if (ext == ".ndjson") ext = ".jsonl";
  fs::create_directories(a.out_dir);
  curate::write_manifests(result.groups, a.out_dir);
  auto& out = out_of(ctx);
  out << "records " << records.size() << ' ' << seed_tag(ctx) << '\n';
  for (int p = 0; p < 3; ++p) {
    const auto name = std::string(curate::part_name(static_cast<curate::Part>(p)));
    io::write_records(result.parts[p], a.out_dir / (name + ext));
    out << "  " << name << " records " << result.parts[p].size() << " compounds "
        << result.groups.keys[p].size() << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_index(const IndexArgs& a, const Context& ctx) {
  require_file(a.input);
  std::vector<std::string> warnings;
  auto records = io::read_records(a.input, &warnings);
  print_warnings(ctx, warnings);
  for (auto& r : records) r = preprocess::prepare(std::move(r));
  const auto lib = search::build_index(records, index_options(ctx.config));
  search::save_index(lib, a.output);
  out_of(ctx) << "indexed " << lib.size() << " entries -> " << a.output.string() << ' ' << seed_tag(ctx)
              << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_search(const SearchArgs& a, const Context& ctx) {
  if (a.method != "sss" && a.method != "hss" && a.method != "bdc")
    throw ConfigError("--method must be sss, hss or bdc");
  if (a.k == 0) throw ConfigError("--k must be positive");
  require_file(a.queries);
  require_file(a.library);
  auto lib = search::load_index(a.library);
  if (a.weights && !(lib.options().weights == *a.weights)) lib = search::with_weights(lib, *a.weights);

  std::ofstream file;
  if (a.output) file = open_out(*a.output);
  std::ostream& out = a.output ? static_cast<std::ostream&>(file) : out_of(ctx);
  out << "# specid search method=" << a.method << " k=" << a.k << (a.leave_one_out ? " leave_one_out" : "")
      << ' ' << seed_tag(ctx) << '\n';
  out << "query,query_name,rank,library_index,score,smiles\n";

  io::RecordReader reader(a.queries);
  constexpr std::size_t kBatch = 512;
  std::vector<SpectrumRecord> batch;
  std::vector<std::vector<search::ScoredCandidate>> results;
  std::size_t base = 0;
  std::size_t rows = 0;
  auto flush = [&] {
    results.assign(batch.size(), {});
    parallel_for(batch.size(), ctx.threads, [&](std::size_t i) {
      const auto q = preprocess::prepare(batch[i]);
      std::optional<std::string> key;
      if (q.smiles) {
        try {
          key = chem::canonicalize(*q.smiles);
        } catch (const Error&) {
        }
      }
      std::vector<double> scores;
      if (a.method == "sss") {
        scores = search::sss_scores(q.peaks, lib);
      } else if (a.method == "hss") {
        std::optional<int> mass = q.nominal_mass;
        if (!mass && q.smiles) mass = chem::nominal_mass(chem::parse_smiles(*q.smiles));
        if (!mass) throw MissingMass("query " + std::to_string(base + i) + " has no mass or structure");
        scores = search::hss_scores(q.peaks, mass, lib);
      } else {
        if (!key) throw UnparseableSmiles(base + i, q.smiles.value_or(""), "bdc needs the query structure");
        scores = search::bdc_scores(*key, lib);
      }
      std::function<bool(std::size_t)> skip;
      if (a.leave_one_out && key) skip = [&](std::size_t e) { return lib.entry(e).smiles == *key; };
      results[i] = search::top_k(scores, lib, a.k, skip);
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      for (std::size_t r = 0; r < results[i].size(); ++r) {
        const auto& c = results[i][r];
        out << base + i << ',' << csv_field(batch[i].name) << ',' << r + 1 << ',' << c.index << ','
            << io::format_number(c.score) << ',' << csv_field(c.smiles) << '\n';
        ++rows;
      }
    }
    base += batch.size();
    batch.clear();
  };
  while (auto r = reader.next()) {
    batch.push_back(std::move(*r));
    if (batch.size() == kBatch) flush();
  }
  flush();
  print_warnings(ctx, reader.warnings());
  if (a.output)
    out_of(ctx) << "queries " << base << " rows " << rows << " method " << a.method << ' ' << seed_tag(ctx)
                << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

namespace {

struct PredictionFile {
  std::string method;
  fs::path path;
};

PredictionFile parse_prediction_arg(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq != std::string::npos && eq > 0) return {arg.substr(0, eq), arg.substr(eq + 1)};
  return {fs::path(arg).stem().string(), arg};
}

std::string canonical_or_raw(const std::string& s) {
  try {
    return chem::canonicalize(s);
  } catch (const Error&) {
    return s;
  }
}

eval::PredictionSet read_predictions(const fs::path& path, const std::vector<std::string>& truths) {
  auto in = open_in(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    header = csv_split(line);
  }
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw FormatError(path.string() + ": missing column '" + name + "'", line_no);
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto cq = column("query");
  const auto cr = column("rank");
  const auto cs = column("smiles");
  std::vector<std::vector<std::pair<long, std::string>>> lists(truths.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = csv_split(line);
    if (cells.size() != header.size()) throw FormatError(path.string() + ": wrong column count", line_no);
    long q = 0;
    long r = 0;
    try {
      q = std::stol(cells[cq]);
      r = std::stol(cells[cr]);
    } catch (const std::exception&) {
      throw FormatError(path.string() + ": bad query or rank", line_no);
    }
    if (q < 0 || static_cast<std::size_t>(q) >= truths.size())
      throw FormatError(path.string() + ": query index " + std::to_string(q) + " out of range", line_no);
    lists[static_cast<std::size_t>(q)].emplace_back(r, canonical_or_raw(cells[cs]));
  }
  eval::PredictionSet set(truths.size());
  for (std::size_t i = 0; i < truths.size(); ++i) {
    auto& l = lists[i];
    std::stable_sort(l.begin(), l.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    set[i].truth = truths[i];
    for (auto& [r, s] : l) set[i].candidates.push_back(std::move(s));
  }
  return set;
}

}  // namespace

int cmd_evaluate(const EvaluateArgs& a, const Context& ctx) {
  if (a.predictions.empty()) throw ConfigError("at least one predictions file is required");
  require_file(a.truth);
  std::vector<std::string> truths;
  {
    io::RecordReader reader(a.truth);
    while (auto r = reader.next()) {
      if (!r->smiles) throw UnparseableSmiles(truths.size(), "", "ground truth record has no SMILES");
      try {
        truths.push_back(chem::canonicalize(*r->smiles));
      } catch (const Error& e) {
        throw UnparseableSmiles(truths.size(), *r->smiles, e.what());
      }
    }
  }
  std::vector<eval::NamedPredictions> methods;
  std::set<std::string> names;
  for (const auto& arg : a.predictions) {
    const auto pf = parse_prediction_arg(arg);
    require_file(pf.path);
    if (!names.insert(pf.method).second) throw ConfigError("duplicate method name '" + pf.method + "'");
    methods.push_back({pf.method, read_predictions(pf.path, truths)});
  }
  eval::EvalOptions opt;
  opt.fp_radius = ctx.config.fp_radius;
  opt.fp_width = ctx.config.fp_width;
  opt.strict = a.strict;
  opt.threads = ctx.threads;
  const auto report = eval::evaluate(methods, ctx.config.ks, opt);
  auto& out = out_of(ctx);
  out << "queries " << truths.size() << ' ' << seed_tag(ctx) << '\n';
  eval::write_report_text(report, out);
  if (a.csv) {
    auto csv = open_out(*a.csv);
    csv << "# specid evaluate " << seed_tag(ctx) << '\n';
    eval::write_report_csv(report, csv);
  }
  return kOk;
}

}  // namespace specid::cli
