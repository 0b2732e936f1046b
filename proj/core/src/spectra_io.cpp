#include "specid/spectra_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "specid/error.hpp"

namespace specid::io {

namespace {

using json = nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool parse_double(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_int(std::string_view token, long long& out) {
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

// Splits a peak line into numeric tokens. Quoted annotations are dropped.
std::vector<std::string_view> peak_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  auto is_delim = [](char c) {
    return c == ' ' || c == '\t' || c == ';' || c == ',' || c == '\r';
  };
  while (i < line.size()) {
    const char c = line[i];
    if (is_delim(c)) {
      ++i;
    } else if (c == '"') {
      const auto close = line.find('"', i + 1);
      i = close == std::string_view::npos ? line.size() : close + 1;
    } else {
      std::size_t j = i;
      while (j < line.size() && !is_delim(line[j]) && line[j] != '"') ++j;
      tokens.push_back(line.substr(i, j - i));
      i = j;
    }
  }
  return tokens;
}

bool looks_numeric(std::string_view line) {
  auto tokens = peak_tokens(line);
  if (tokens.empty()) return false;
  double v;
  return parse_double(tokens.front(), v);
}

std::string generated_comment(const std::string& smiles) {
  return "\"SMILES=" + smiles + "\"";
}

// Pulls SMILES=... out of a NIST-style Comments value.
std::optional<std::string> smiles_from_comment(std::string_view comment) {
  const auto pos = comment.find("SMILES=");
  if (pos == std::string_view::npos) return std::nullopt;
  auto rest = comment.substr(pos + 7);
  std::size_t end = 0;
  while (end < rest.size() && rest[end] != '"' && rest[end] != ' ' &&
         rest[end] != '\t')
    ++end;
  auto value = rest.substr(0, end);
  if (value.empty()) return std::nullopt;
  return std::string(value);
}

}  // namespace

// ---------------------------------------------------------------------------

Source Source::parse(std::string_view text) {
  const auto t = lower(trim(text));
  if (t == "nist") return nist();
  if (t == "neims") return neims();
  if (t == "rassp") return rassp();
  return other(std::string(trim(text)));
}

std::string Source::name() const {
  switch (kind) {
    case SourceKind::nist: return "nist";
    case SourceKind::neims: return "neims";
    case SourceKind::rassp: return "rassp";
    case SourceKind::other: return label;
  }
  return label;
}

void sort_peaks(SpectrumRecord& record) {
  std::stable_sort(record.peaks.begin(), record.peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.mz < b.mz; });
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// MSP reader

MspReader::MspReader(std::istream& in) : in_(in) {}

bool MspReader::read_line(std::string& line) {
  if (lookahead_) {
    line = std::move(*lookahead_);
    lookahead_.reset();
    return true;
  }
  if (!std::getline(in_, line)) return false;
  ++line_no_;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::optional<SpectrumRecord> MspReader::next() {
  SpectrumRecord rec;
  bool active = false;
  bool have_name = false;
  bool in_peaks = false;
  std::size_t declared = 0;
  std::size_t start_line = 0;
  std::map<std::string, std::string> seen_keys;  // lower-case -> spelling
  std::optional<std::string> comment;

  auto warn = [&](const std::string& msg) {
    warnings_.push_back("line " + std::to_string(line_no_) + ": " + msg);
  };
  auto note_key = [&](const std::string& key_lower, std::string_view key) {
    auto [it, inserted] = seen_keys.emplace(key_lower, std::string(key));
    if (!inserted) warn("duplicate header '" + std::string(key) + "', last value wins");
  };

  auto finish = [&]() -> SpectrumRecord {
    const std::size_t index = records_read_;
    if (!have_name)
      throw MissingHeader("record " + std::to_string(index) + ": no Name line",
                          start_line);
    if (!in_peaks)
      throw MissingHeader("record " + std::to_string(index) + ": no Num Peaks line",
                          start_line);
    if (rec.peaks.size() != declared)
      throw PeakCountMismatch(index, declared, rec.peaks.size(), line_no_);
    if (comment) {
      bool consumed = false;
      if (rec.smiles) {
        consumed = *comment == generated_comment(*rec.smiles);
      } else if (auto extracted = smiles_from_comment(*comment)) {
        rec.smiles = *extracted;
        consumed = *comment == generated_comment(*extracted);
      }
      if (!consumed) rec.metadata[seen_keys["comments"]] = *comment;
    }
    sort_peaks(rec);
    ++records_read_;
    return rec;
  };

  std::string line;
  while (read_line(line)) {
    if (is_blank(line)) {
      if (active) return finish();
      continue;
    }
    if (!active) {
      active = true;
      start_line = line_no_;
    }
    if (in_peaks) {
      if (rec.peaks.size() >= declared && !looks_numeric(line)) {
        // Next record without a separating blank line.
        lookahead_ = line;
        return finish();
      }
      auto tokens = peak_tokens(line);
      if (tokens.size() % 2 != 0)
        throw MalformedPeak("odd number of values in peak line", line_no_);
      for (std::size_t i = 0; i < tokens.size(); i += 2) {
        Peak p;
        if (!parse_double(tokens[i], p.mz) || !parse_double(tokens[i + 1], p.intensity))
          throw MalformedPeak("non-numeric peak token in '" + std::string(trim(line)) + "'",
                              line_no_);
        if (!(p.mz >= 0.0) || !(p.intensity >= 0.0) || !std::isfinite(p.mz) ||
            !std::isfinite(p.intensity))
          throw MalformedPeak("negative or non-finite peak value", line_no_);
        rec.peaks.push_back(p);
      }
      if (rec.peaks.size() > declared)
        throw PeakCountMismatch(records_read_, declared, rec.peaks.size(), line_no_);
      continue;
    }

    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      if (looks_numeric(line))
        throw MissingHeader("record " + std::to_string(records_read_) +
                                ": peak data before Num Peaks",
                            line_no_);
      warn("ignored line without ':'");
      continue;
    }
    const auto key = trim(std::string_view(line).substr(0, colon));
    const auto value = std::string(trim(std::string_view(line).substr(colon + 1)));
    const auto k = lower(key);
    note_key(k, key);

    if (k == "name") {
      rec.name = value;
      have_name = true;
    } else if (k == "num peaks" || k == "num_peaks" || k == "numpeaks") {
      long long n = 0;
      if (!parse_int(value, n) || n < 0)
        throw MalformedPeak("bad Num Peaks value '" + value + "'", line_no_);
      declared = static_cast<std::size_t>(n);
      in_peaks = true;
    } else if (k == "smiles") {
      if (value.empty())
        rec.smiles.reset();
      else
        rec.smiles = value;
    } else if (k == "mw") {
      double mw = 0.0;
      if (parse_double(value, mw) && mw >= 0.0) {
        rec.nominal_mass = static_cast<int>(std::floor(mw + 0.5));
      } else {
        warn("unparseable MW '" + value + "' kept as metadata");
        rec.metadata[std::string(key)] = value;
      }
    } else if (k == "formula") {
      try {
        rec.formula = parse_formula(value);
      } catch (const FormatError&) {
        warn("unparseable Formula '" + value + "' kept as metadata");
        rec.metadata[std::string(key)] = value;
      }
    } else if (k == "source") {
      rec.source = Source::parse(value);
    } else if (k == "comments") {
      comment = value;
    } else {
      // Drop an earlier spelling of the same key so last-wins holds.
      for (auto it = rec.metadata.begin(); it != rec.metadata.end();) {
        if (lower(it->first) == k)
          it = rec.metadata.erase(it);
        else
          ++it;
      }
      rec.metadata[std::string(key)] = value;
    }
  }
  if (active) return finish();
  return std::nullopt;
}

std::vector<SpectrumRecord> parse_msp(std::istream& in,
                                      std::vector<std::string>* warnings) {
  MspReader reader(in);
  std::vector<SpectrumRecord> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  if (warnings) *warnings = reader.warnings();
  return out;
}

std::vector<SpectrumRecord> parse_msp(std::string_view text,
                                      std::vector<std::string>* warnings) {
  std::istringstream in{std::string(text)};
  return parse_msp(in, warnings);
}

void write_msp_record(std::ostream& out, const SpectrumRecord& r) {
  out << "Name: " << r.name << '\n';
  if (r.formula && !r.formula->empty()) out << "Formula: " << format_formula(*r.formula) << '\n';
  if (r.nominal_mass) out << "MW: " << *r.nominal_mass << '\n';
  const bool has_comment = std::any_of(r.metadata.begin(), r.metadata.end(), [](const auto& kv) {
    return lower(kv.first) == "comments";
  });
  if (r.smiles) {
    if (!has_comment) out << "Comments: " << generated_comment(*r.smiles) << '\n';
    out << "SMILES: " << *r.smiles << '\n';
  }
  if (!r.source.unspecified()) out << "Source: " << r.source.name() << '\n';
  for (const auto& [key, value] : r.metadata) out << key << ": " << value << '\n';
  out << "Num Peaks: " << r.peaks.size() << '\n';
  for (const auto& p : r.peaks)
    out << format_number(p.mz) << ' ' << format_number(p.intensity) << '\n';
}

std::string write_msp(std::span<const SpectrumRecord> records) {
  std::ostringstream out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i > 0) out << '\n';
    write_msp_record(out, records[i]);
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// JSON lines

std::string to_json_line(const SpectrumRecord& r) {
  json j;
  j["name"] = r.name;
  json peaks = json::array();
  for (const auto& p : r.peaks) peaks.push_back(json::array({p.mz, p.intensity}));
  j["peaks"] = std::move(peaks);
  if (r.smiles) j["smiles"] = *r.smiles;
  if (r.nominal_mass) j["mw"] = *r.nominal_mass;
  if (r.formula) {
    json f = json::object();
    for (const auto& [el, n] : *r.formula) f[el] = n;
    j["formula"] = std::move(f);
  }
  if (!r.source.unspecified()) j["source"] = r.source.name();
  if (!r.metadata.empty()) j["meta"] = r.metadata;
  return j.dump();
}

SpectrumRecord from_json_line(std::string_view line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw FormatError("record is not a JSON object", line_no);
  SpectrumRecord r;
  try {
    if (!j.contains("name") || !j["name"].is_string())
      throw FormatError("missing string field 'name'", line_no);
    r.name = j["name"].get<std::string>();
    if (!j.contains("peaks") || !j["peaks"].is_array())
      throw FormatError("missing array field 'peaks'", line_no);
    for (const auto& p : j["peaks"]) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw MalformedPeak("peak must be [mz, intensity]", line_no);
      Peak peak{p[0].get<double>(), p[1].get<double>()};
      if (!(peak.mz >= 0.0) || !(peak.intensity >= 0.0))
        throw MalformedPeak("negative peak value", line_no);
      r.peaks.push_back(peak);
    }
    if (auto it = j.find("smiles"); it != j.end() && !it->is_null())
      r.smiles = it->get<std::string>();
    if (auto it = j.find("mw"); it != j.end() && !it->is_null()) {
      if (!it->is_number()) throw FormatError("'mw' must be a number", line_no);
      r.nominal_mass = static_cast<int>(std::floor(it->get<double>() + 0.5));
    }
    if (auto it = j.find("formula"); it != j.end() && !it->is_null()) {
      Formula f;
      if (it->is_string()) {
        f = parse_formula(it->get<std::string>());
      } else if (it->is_object()) {
        for (const auto& [el, n] : it->items()) {
          if (!n.is_number_integer() || n.get<int>() <= 0)
            throw FormatError("formula counts must be positive integers", line_no);
          f[el] = n.get<int>();
        }
      } else {
        throw FormatError("'formula' must be an object", line_no);
      }
      r.formula = std::move(f);
    }
    if (auto it = j.find("source"); it != j.end() && !it->is_null())
      r.source = Source::parse(it->get<std::string>());
    if (auto it = j.find("meta"); it != j.end() && !it->is_null())
      r.metadata = it->get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad field type: ") + e.what(), line_no);
  } catch (const FormatError& e) {
    if (e.line() == 0 && line_no != 0) throw FormatError(e.what(), line_no);
    throw;
  }
  sort_peaks(r);
  return r;
}

// ---------------------------------------------------------------------------
// Files

FileFormat format_for_path(const std::filesystem::path& path) {
  const auto ext = lower(path.extension().string());
  if (ext == ".msp") return FileFormat::msp;
  if (ext == ".jsonl" || ext == ".ndjson") return FileFormat::jsonl;
  throw FormatError("unknown spectra file extension '" + ext + "' for " + path.string() +
                        " (expected .msp or .jsonl)",
                    0);
}

struct RecordReader::Impl {
  FileFormat format;
  std::ifstream in;
  std::unique_ptr<MspReader> msp;
  std::size_t line_no = 0;
  std::vector<std::string> no_warnings;
};

RecordReader::RecordReader(const std::filesystem::path& path)
    : impl_(std::make_unique<Impl>()) {
  impl_->format = format_for_path(path);
  impl_->in.open(path, std::ios::binary);
  if (!impl_->in) throw IoError("cannot open " + path.string() + " for reading");
  if (impl_->format == FileFormat::msp) impl_->msp = std::make_unique<MspReader>(impl_->in);
}

RecordReader::~RecordReader() = default;
RecordReader::RecordReader(RecordReader&&) noexcept = default;
RecordReader& RecordReader::operator=(RecordReader&&) noexcept = default;

std::optional<SpectrumRecord> RecordReader::next() {
  if (impl_->msp) return impl_->msp->next();
  std::string line;
  while (std::getline(impl_->in, line)) {
    ++impl_->line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    return from_json_line(line, impl_->line_no);
  }
  if (impl_->in.bad()) throw IoError("read failure");
  return std::nullopt;
}

const std::vector<std::string>& RecordReader::warnings() const {
  if (impl_->msp) return impl_->msp->warnings();
  return impl_->no_warnings;
}

struct RecordWriter::Impl {
  FileFormat format;
  std::filesystem::path path;
  std::ofstream out;
  std::size_t written = 0;
};

RecordWriter::RecordWriter(const std::filesystem::path& path)
    : impl_(std::make_unique<Impl>()) {
  impl_->format = format_for_path(path);
  impl_->path = path;
  impl_->out.open(path, std::ios::binary | std::ios::trunc);
  if (!impl_->out) throw IoError("cannot open " + path.string() + " for writing");
}

RecordWriter::~RecordWriter() {
  if (impl_ && impl_->out.is_open()) impl_->out.close();
}
RecordWriter::RecordWriter(RecordWriter&&) noexcept = default;
RecordWriter& RecordWriter::operator=(RecordWriter&&) noexcept = default;

void RecordWriter::write(const SpectrumRecord& record) {
  if (impl_->format == FileFormat::msp) {
    if (impl_->written > 0) impl_->out << '\n';
    write_msp_record(impl_->out, record);
  } else {
    impl_->out << to_json_line(record) << '\n';
  }
  ++impl_->written;
  if (!impl_->out) throw IoError("write failure on " + impl_->path.string());
}

void RecordWriter::close() {
  impl_->out.flush();
  if (!impl_->out) throw IoError("write failure on " + impl_->path.string());
  impl_->out.close();
}

std::size_t RecordWriter::written() const noexcept { return impl_->written; }

std::vector<SpectrumRecord> read_records(const std::filesystem::path& path,
                                         std::vector<std::string>* warnings) {
  RecordReader reader(path);
  std::vector<SpectrumRecord> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  if (warnings) *warnings = reader.warnings();
  return out;
}

void write_records(std::span<const SpectrumRecord> records,
                   const std::filesystem::path& path) {
  RecordWriter writer(path);
  for (const auto& r : records) writer.write(r);
  writer.close();
}

}  // namespace specid::io
