#include "specid/search.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "specid/chem.hpp"
#include "specid/error.hpp"
#include "specid/smiles.hpp"

namespace specid::search {

using nlohmann::json;

void SimilarityWeights::validate() const {
  if (!(a >= 0.0) || !(c >= 0.0) || !std::isfinite(a) || !std::isfinite(c))
    throw ConfigError("similarity weights must be finite and non-negative");
}

WeightedSpectrum weigh(std::span<const io::Peak> peaks, const SimilarityWeights& weights) {
  std::map<long, double> merged;
  for (const auto& p : peaks)
    if (p.intensity > 0.0) merged[std::lround(p.mz)] += p.intensity;
  WeightedSpectrum out;
  out.reserve(merged.size());
  double norm = 0.0;
  for (const auto& [mz, in] : merged) {
    const double w = std::pow(in, weights.a) * std::pow(static_cast<double>(mz), weights.c);
    if (!(w > 0.0)) continue;
    out.push_back({static_cast<int>(mz), w});
    norm += w * w;
  }
  if (norm == 0.0) return {};
  norm = std::sqrt(norm);
  for (auto& p : out) p.w /= norm;
  return out;
}

SpectralLibrary::SpectralLibrary(std::vector<LibraryEntry> entries, IndexOptions options)
    : entries_(std::move(entries)), options_(std::move(options)) {
  for (const auto& e : entries_)
    if (!e.spectrum.empty()) max_mz_ = std::max(max_mz_, e.spectrum.back().mz);
}

SpectralLibrary build_index(std::span<const io::SpectrumRecord> records, const IndexOptions& options) {
  options.weights.validate();
  std::vector<LibraryEntry> entries;
  entries.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.smiles) throw UnparseableSmiles(i, "", "record has no SMILES");
    chem::MolecularGraph g;
    try {
      g = chem::parse_smiles(*r.smiles);
    } catch (const Error& e) {
      throw UnparseableSmiles(i, *r.smiles, e.what());
    }
    LibraryEntry e;
    e.name = r.name;
    e.smiles = chem::canonical_smiles(g);
    e.nominal_mass = r.nominal_mass ? *r.nominal_mass : chem::nominal_mass(g);
    e.peaks = r.peaks;
    e.spectrum = weigh(r.peaks, options.weights);
    e.fingerprint = chem::morgan_fingerprint(g, options.fp_radius, options.fp_width);
    entries.push_back(std::move(e));
  }
  return SpectralLibrary(std::move(entries), options);
}

SpectralLibrary with_weights(const SpectralLibrary& lib, const SimilarityWeights& weights) {
  weights.validate();
  std::vector<LibraryEntry> entries(lib.entries().begin(), lib.entries().end());
  for (auto& e : entries) e.spectrum = weigh(e.peaks, weights);
  auto options = lib.options();
  options.weights = weights;
  return SpectralLibrary(std::move(entries), options);
}

namespace {

WeightedSpectrum weigh_query(std::span<const io::Peak> query, const SpectralLibrary& lib) {
  auto q = weigh(query, lib.options().weights);
  if (q.empty()) throw EmptyQuery("query spectrum has no positive peaks");
  return q;
}

// Weight of the entry at m/z `mz`, walking `pos` forward; queries must come
// in ascending order.
double lookup(const WeightedSpectrum& e, std::size_t& pos, int mz) {
  while (pos < e.size() && e[pos].mz < mz) ++pos;
  return pos < e.size() && e[pos].mz == mz ? e[pos].w : 0.0;
}

double clamp01(double s) { return s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s); }

double score_direct(const WeightedSpectrum& q, const WeightedSpectrum& e) {
  double s = 0.0;
  std::size_t pos = 0;
  for (const auto& p : q) s += p.w * lookup(e, pos, p.mz);
  return clamp01(s);
}

double score_hybrid(const WeightedSpectrum& q, const WeightedSpectrum& e, int delta, int max_mz) {
  double s = 0.0;
  std::size_t pos = 0;
  std::size_t shifted_pos = 0;
  for (const auto& p : q) {
    const double direct = p.w * lookup(e, pos, p.mz);
    const int m = p.mz + delta;
    const double shifted = m >= 1 && m <= max_mz ? p.w * lookup(e, shifted_pos, m) : 0.0;
    s += std::max(direct, shifted);
  }
  return clamp01(s);
}

}  // namespace

std::vector<double> sss_scores(std::span<const io::Peak> query, const SpectralLibrary& lib) {
  const auto q = weigh_query(query, lib);
  std::vector<double> out(lib.size());
  for (std::size_t i = 0; i < lib.size(); ++i) out[i] = score_direct(q, lib.entry(i).spectrum);
  return out;
}

std::vector<double> hss_scores(std::span<const io::Peak> query, std::optional<int> query_mass,
                               const SpectralLibrary& lib) {
  if (!query_mass) throw MissingMass("hybrid search needs the query nominal mass");
  const auto q = weigh_query(query, lib);
  std::vector<double> out(lib.size());
  for (std::size_t i = 0; i < lib.size(); ++i) {
    const auto& e = lib.entry(i);
    out[i] = score_hybrid(q, e.spectrum, e.nominal_mass - *query_mass, lib.max_mz());
  }
  return out;
}

std::vector<double> bdc_scores(std::string_view query_smiles, const SpectralLibrary& lib) {
  chem::MolecularGraph g;
  try {
    g = chem::parse_smiles(query_smiles);
  } catch (const Error& e) {
    throw UnparseableSmiles(0, std::string(query_smiles), e.what());
  }
  const auto fp = chem::morgan_fingerprint(g, lib.options().fp_radius, lib.options().fp_width);
  std::vector<double> out(lib.size());
  for (std::size_t i = 0; i < lib.size(); ++i) out[i] = chem::tanimoto(fp, lib.entry(i).fingerprint);
  return out;
}

std::vector<ScoredCandidate> top_k(std::span<const double> scores, const SpectralLibrary& lib,
                                   std::size_t k, const std::function<bool(std::size_t)>& skip) {
  std::vector<std::size_t> idx;
  idx.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (!skip || !skip(i)) idx.push_back(i);
  const std::size_t m = std::min(k, idx.size());
  auto better = [&](std::size_t x, std::size_t y) {
    return scores[x] != scores[y] ? scores[x] > scores[y] : x < y;
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m), idx.end(), better);
  std::vector<ScoredCandidate> out;
  out.reserve(m);
  for (std::size_t r = 0; r < m; ++r) out.push_back({idx[r], scores[idx[r]], lib.entry(idx[r]).smiles});
  return out;
}

std::vector<ScoredCandidate> top_k(std::span<const double> scores, const SpectralLibrary& lib,
                                   std::size_t k) {
  return top_k(scores, lib, k, {});
}

std::vector<ScoredCandidate> sss(std::span<const io::Peak> query, const SpectralLibrary& lib,
                                 std::size_t k) {
  if (lib.empty()) {
    (void)weigh_query(query, lib);
    return {};
  }
  return top_k(sss_scores(query, lib), lib, k);
}

std::vector<ScoredCandidate> hss(std::span<const io::Peak> query, std::optional<int> query_mass,
                                 const SpectralLibrary& lib, std::size_t k) {
  return top_k(hss_scores(query, query_mass, lib), lib, k);
}

std::vector<ScoredCandidate> bdc(std::string_view query_smiles, const SpectralLibrary& lib,
                                 std::size_t k) {
  return top_k(bdc_scores(query_smiles, lib), lib, k);
}

// ---------------------------------------------------------------------------
// Index file

namespace {

constexpr const char* kFormat = "specid-index";
constexpr int kVersion = 1;

}  // namespace

void save_index(const SpectralLibrary& lib, std::ostream& out) {
  const auto& o = lib.options();
  json header = {
      {"format", kFormat},
      {"version", kVersion},
      {"entries", lib.size()},
      {"weights", {{"a", o.weights.a}, {"c", o.weights.c}}},
      {"binning", {{"base", o.binning.base}, {"shift", o.binning.shift}}},
      {"fingerprint", {{"radius", o.fp_radius}, {"width", o.fp_width}}},
  };
  out << header.dump() << '\n';
  for (const auto& e : lib.entries()) {
    json peaks = json::array();
    for (const auto& p : e.peaks) peaks.push_back({p.mz, p.intensity});
    json line = {{"name", e.name}, {"smiles", e.smiles}, {"mw", e.nominal_mass}, {"peaks", std::move(peaks)}};
    out << line.dump() << '\n';
  }
}

void save_index(const SpectralLibrary& lib, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save_index(lib, out);
  if (!out) throw IoError("write failed for " + path.string());
}

SpectralLibrary load_index(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw FormatError("empty index file", line_no);
  IndexOptions o;
  std::size_t declared = 0;
  try {
    const auto h = json::parse(line);
    if (h.at("format").get<std::string>() != kFormat) throw FormatError("not a specid index", line_no);
    if (h.at("version").get<int>() != kVersion)
      throw FormatError("unsupported index version " + h.at("version").dump(), line_no);
    o.weights.a = h.at("weights").at("a").get<double>();
    o.weights.c = h.at("weights").at("c").get<double>();
    o.binning.base = h.at("binning").at("base").get<double>();
    o.binning.shift = h.at("binning").at("shift").get<int>();
    o.fp_radius = h.at("fingerprint").at("radius").get<int>();
    o.fp_width = h.at("fingerprint").at("width").get<std::size_t>();
    declared = h.at("entries").get<std::size_t>();
    o.weights.validate();
    o.binning.validate();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad index header: ") + e.what(), line_no);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("bad index header: ") + e.what(), line_no);
  }

  std::vector<LibraryEntry> entries;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    LibraryEntry e;
    try {
      const auto j = json::parse(line);
      e.name = j.at("name").get<std::string>();
      e.smiles = j.at("smiles").get<std::string>();
      e.nominal_mass = j.at("mw").get<int>();
      for (const auto& p : j.at("peaks")) e.peaks.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      e.fingerprint = chem::morgan_fingerprint(chem::parse_smiles(e.smiles), o.fp_radius, o.fp_width);
    } catch (const json::exception& ex) {
      throw FormatError(std::string("bad index entry: ") + ex.what(), line_no);
    } catch (const Error& ex) {
      throw FormatError(std::string("bad index entry: ") + ex.what(), line_no);
    }
    e.spectrum = weigh(e.peaks, o.weights);
    entries.push_back(std::move(e));
  }
  if (entries.size() != declared)
    throw FormatError("index declares " + std::to_string(declared) + " entries, found " +
                          std::to_string(entries.size()),
                      line_no);
  return SpectralLibrary(std::move(entries), o);
}

SpectralLibrary load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load_index(in);
}

}  // namespace specid::search
