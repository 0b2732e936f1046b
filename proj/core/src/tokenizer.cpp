#include "specid/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "specid/error.hpp"

namespace specid::tok {

namespace {

constexpr std::array<std::string_view, kSpecialCount> kSpecialNames = {
    "<pad>", "<bos>", "<eos>", "<unk>", "<nist>", "<neims>", "<rassp>",
    "<reserved0>", "<reserved1>", "<reserved2>", "<reserved3>"};

constexpr char kHex[] = "0123456789abcdef";

std::string to_hex(std::string_view bytes) {
  std::string s;
  s.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    s += kHex[c >> 4];
    s += kHex[c & 15];
  }
  return s;
}

std::uint64_t pair_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

std::span<const std::string_view> special_names() { return kSpecialNames; }

Vocabulary::Vocabulary() {
  tokens_.resize(kSpecialCount);
  for (int b = 0; b < 256; ++b) tokens_.emplace_back(1, static_cast<char>(b));
}

const std::string& Vocabulary::bytes(int id) const {
  if (id < kSpecialCount || static_cast<std::size_t>(id) >= tokens_.size())
    throw UnknownToken("no byte content for token id " + std::to_string(id));
  return tokens_[static_cast<std::size_t>(id)];
}

std::string Vocabulary::display(int id) const {
  if (is_special(id)) return std::string(kSpecialNames[static_cast<std::size_t>(id)]);
  return to_hex(bytes(id));
}

int Vocabulary::add_merged(int left, int right) {
  tokens_.push_back(bytes(left) + bytes(right));
  return static_cast<int>(tokens_.size()) - 1;
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct PairStats {
  long long count = 0;
  std::vector<int> words;  // may hold stale or repeated entries
};

class Trainer {
 public:
  Trainer(std::span<const std::string> corpus, const TrainOptions& opt) : opt_(opt) {
    std::map<std::string_view, int> index;
    corpus_word_.reserve(corpus.size());
    for (const auto& s : corpus) {
      auto [it, inserted] = index.emplace(s, static_cast<int>(words_.size()));
      if (inserted) {
        std::vector<int> ids;
        ids.reserve(s.size());
        for (unsigned char c : s) ids.push_back(Vocabulary::byte_id(c));
        words_.push_back(std::move(ids));
        freq_.push_back(0);
      }
      ++freq_[static_cast<std::size_t>(it->second)];
      corpus_word_.push_back(it->second);
    }
    for (std::size_t w = 0; w < words_.size(); ++w) add_pairs(static_cast<int>(w));
  }

  Tokenizer run(std::vector<std::vector<int>>* segmentations) {
    Tokenizer t;
    t.model.min_frequency = opt_.min_frequency;
    while (opt_.max_merges == 0 || t.model.merges.size() < opt_.max_merges) {
      const auto best = select(t.vocab);
      if (!best) break;
      const auto [left, right] = *best;
      const int id = t.vocab.add_merged(left, right);
      t.model.merges.emplace_back(left, right);
      apply(left, right, id);
    }
    if (segmentations) {
      segmentations->clear();
      for (int w : corpus_word_) segmentations->push_back(words_[static_cast<std::size_t>(w)]);
    }
    return t;
  }

 private:
  void add_pairs(int w) {
    const auto& ids = words_[static_cast<std::size_t>(w)];
    const long long f = freq_[static_cast<std::size_t>(w)];
    for (std::size_t k = 0; k + 1 < ids.size(); ++k) {
      auto& st = pairs_[pair_key(ids[k], ids[k + 1])];
      st.count += f;
      if (st.words.empty() || st.words.back() != w) st.words.push_back(w);
    }
  }

  void remove_pairs(int w) {
    const auto& ids = words_[static_cast<std::size_t>(w)];
    const long long f = freq_[static_cast<std::size_t>(w)];
    for (std::size_t k = 0; k + 1 < ids.size(); ++k) pairs_[pair_key(ids[k], ids[k + 1])].count -= f;
  }

  std::optional<std::pair<int, int>> select(const Vocabulary& vocab) const {
    std::optional<std::pair<int, int>> best;
    long long best_count = 0;
    for (const auto& [key, st] : pairs_) {
      if (st.count < opt_.min_frequency || st.count < best_count) continue;
      const int a = static_cast<int>(key >> 32);
      const int b = static_cast<int>(key & 0xffffffffU);
      if (st.count == best_count && best) {
        const auto& ba = vocab.bytes(a);
        const auto& bb = vocab.bytes(b);
        const auto& ca = vocab.bytes(best->first);
        const auto& cb = vocab.bytes(best->second);
        if (std::tie(ba, bb) >= std::tie(ca, cb)) continue;
      }
      best = std::pair{a, b};
      best_count = st.count;
    }
    return best;
  }

  void apply(int left, int right, int id) {
    const auto key = pair_key(left, right);
    auto words = std::move(pairs_[key].words);
    pairs_.erase(key);
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    std::vector<int> merged;
    for (int w : words) {
      auto& ids = words_[static_cast<std::size_t>(w)];
      bool present = false;
      for (std::size_t k = 0; k + 1 < ids.size() && !present; ++k)
        present = ids[k] == left && ids[k + 1] == right;
      if (!present) continue;
      remove_pairs(w);
      merged.clear();
      for (std::size_t k = 0; k < ids.size(); ++k) {
        if (k + 1 < ids.size() && ids[k] == left && ids[k + 1] == right) {
          merged.push_back(id);
          ++k;
        } else {
          merged.push_back(ids[k]);
        }
      }
      ids.swap(merged);
      add_pairs(w);
    }
    for (auto it = pairs_.begin(); it != pairs_.end();) {
      if (it->second.count <= 0) it = pairs_.erase(it);
      else ++it;
    }
  }

  TrainOptions opt_;
  std::vector<std::vector<int>> words_;
  std::vector<long long> freq_;
  std::vector<int> corpus_word_;
  std::unordered_map<std::uint64_t, PairStats> pairs_;
};

}  // namespace

Tokenizer train_bpe(std::span<const std::string> corpus, const TrainOptions& options,
                    std::vector<std::vector<int>>* segmentations) {
  if (corpus.empty()) throw EmptyCorpus("BPE training corpus is empty");
  if (options.min_frequency < 1) throw ConfigError("min_frequency must be >= 1");
  return Trainer(corpus, options).run(segmentations);
}

Tokenizer train_bpe(std::span<const std::string> corpus, int min_frequency) {
  TrainOptions opt;
  opt.min_frequency = min_frequency;
  return train_bpe(corpus, opt);
}

Tokenizer char_level() { return {}; }

// ---------------------------------------------------------------------------
// Encoding

std::vector<int> segment(std::string_view text, const Vocabulary& vocab, const BpeModel& model) {
  (void)vocab;
  std::vector<int> ids;
  ids.reserve(text.size());
  for (unsigned char c : text) ids.push_back(Vocabulary::byte_id(c));
  if (model.merges.empty() || ids.size() < 2) return ids;

  // A merge can only create pairs of higher rank, so repeatedly applying the
  // lowest-ranked pair present replays the training order.
  std::unordered_map<std::uint64_t, int> rank;
  rank.reserve(model.merges.size() * 2);
  for (std::size_t r = 0; r < model.merges.size(); ++r)
    rank.emplace(pair_key(model.merges[r].first, model.merges[r].second), static_cast<int>(r));

  std::vector<int> next;
  while (ids.size() > 1) {
    int best = -1;
    for (std::size_t k = 0; k + 1 < ids.size(); ++k) {
      auto it = rank.find(pair_key(ids[k], ids[k + 1]));
      if (it != rank.end() && (best < 0 || it->second < best)) best = it->second;
    }
    if (best < 0) break;
    const auto [l, r] = model.merges[static_cast<std::size_t>(best)];
    const int id = kCharLevelSize + best;
    next.clear();
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (k + 1 < ids.size() && ids[k] == l && ids[k + 1] == r) {
        next.push_back(id);
        ++k;
      } else {
        next.push_back(ids[k]);
      }
    }
    ids.swap(next);
  }
  return ids;
}

int source_token(const io::Source& source) {
  switch (source.kind) {
    case io::SourceKind::nist: return kNist;
    case io::SourceKind::neims: return kNeims;
    case io::SourceKind::rassp: return kRassp;
    case io::SourceKind::other: break;
  }
  throw UnknownSource("no source token for '" + source.name() + "'");
}

std::vector<int> encode(std::string_view text, const Vocabulary& vocab, const BpeModel& model,
                        const io::Source& source) {
  const int src = source_token(source);
  auto body = segment(text, vocab, model);
  std::vector<int> out;
  out.reserve(body.size() + 3);
  out.push_back(kBos);
  out.push_back(src);
  out.insert(out.end(), body.begin(), body.end());
  out.push_back(kEos);
  return out;
}

std::string decode(std::span<const int> ids, const Vocabulary& vocab) {
  std::string s;
  for (int id : ids) {
    if (vocab.is_special(id)) continue;
    s += vocab.bytes(id);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Files

namespace {

constexpr std::string_view kHeader = "specid-bpe 1";

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string from_hex(std::string_view hex, std::size_t line) {
  if (hex.empty() || hex.size() % 2 != 0) throw FormatError("bad hex token '" + std::string(hex) + "'", line);
  std::string s;
  for (std::size_t k = 0; k < hex.size(); k += 2) {
    const int hi = hex_digit(hex[k]);
    const int lo = hex_digit(hex[k + 1]);
    if (hi < 0 || lo < 0) throw FormatError("bad hex token '" + std::string(hex) + "'", line);
    s += static_cast<char>(hi * 16 + lo);
  }
  return s;
}

}  // namespace

void save(const Tokenizer& t, std::ostream& out) {
  out << kHeader << " min_frequency=" << t.model.min_frequency << " size=" << t.vocab.size() << '\n';
  for (std::size_t id = 0; id < t.vocab.size(); ++id) out << t.vocab.display(static_cast<int>(id)) << '\n';
  out << "#merges\n";
  for (const auto& [l, r] : t.model.merges) out << l << ' ' << r << '\n';
}

Tokenizer load(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line.rfind(kHeader, 0) != 0)
    throw FormatError("missing tokenizer header", line_no);
  Tokenizer t;
  std::size_t declared = 0;
  {
    std::istringstream hs(line.substr(kHeader.size()));
    std::string field;
    while (hs >> field) {
      if (field.rfind("min_frequency=", 0) == 0) t.model.min_frequency = std::stoi(field.substr(14));
      else if (field.rfind("size=", 0) == 0) declared = std::stoul(field.substr(5));
    }
  }
  std::vector<std::string> tokens;
  bool merges_section = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line == "#merges") {
      merges_section = true;
      continue;
    }
    if (!merges_section) {
      tokens.push_back(line);
      continue;
    }
    std::istringstream ls(line);
    int l = -1;
    int r = -1;
    if (!(ls >> l >> r)) throw FormatError("bad merge line", line_no);
    const int expected = static_cast<int>(t.vocab.size());
    if (static_cast<std::size_t>(expected) >= tokens.size())
      throw FormatError("more merges than tokens", line_no);
    try {
      t.vocab.add_merged(l, r);
    } catch (const UnknownToken& e) {
      throw FormatError(e.what(), line_no);
    }
    if (t.vocab.display(expected) != tokens[static_cast<std::size_t>(expected)])
      throw FormatError("merge does not produce listed token " + tokens[static_cast<std::size_t>(expected)], line_no);
    t.model.merges.emplace_back(l, r);
  }
  if (tokens.size() != t.vocab.size() || (declared != 0 && declared != tokens.size()))
    throw FormatError("token list and merges disagree", line_no);
  for (std::size_t id = 0; id < static_cast<std::size_t>(kCharLevelSize); ++id) {
    const auto& tok = tokens[id];
    const bool ok = id < static_cast<std::size_t>(kSpecialCount)
                        ? tok == kSpecialNames[id]
                        : from_hex(tok, id + 2) == t.vocab.bytes(static_cast<int>(id));
    if (!ok) throw FormatError("unexpected base token '" + tok + "'", id + 2);
  }
  return t;
}

}  // namespace specid::tok
