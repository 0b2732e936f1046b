#include <doctest.h>

#include <map>
#include <sstream>

#include "specid/error.hpp"
#include "specid/tokenizer.hpp"
#include "support/generators.hpp"

using namespace specid;
using namespace specid::tok;

namespace {

// Reference trainer: recounts every pair from scratch after each merge.
std::vector<std::pair<std::string, std::string>> naive_bpe(const std::vector<std::string>& corpus, int mf) {
  std::vector<std::vector<std::string>> words;
  for (const auto& s : corpus) {
    std::vector<std::string> w;
    for (char c : s) w.emplace_back(1, c);
    words.push_back(w);
  }
  std::vector<std::pair<std::string, std::string>> merges;
  for (;;) {
    std::map<std::pair<std::string, std::string>, long> counts;
    for (const auto& w : words)
      for (std::size_t k = 0; k + 1 < w.size(); ++k) ++counts[{w[k], w[k + 1]}];
    const std::pair<std::string, std::string>* best = nullptr;
    long best_n = 0;
    for (const auto& [pair, n] : counts)  // map order = (left, right) lexicographic
      if (n > best_n) {
        best = &pair;
        best_n = n;
      }
    if (!best || best_n < mf) break;
    const auto chosen = *best;
    merges.push_back(chosen);
    for (auto& w : words) {
      std::vector<std::string> out;
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (k + 1 < w.size() && w[k] == chosen.first && w[k + 1] == chosen.second) {
          out.push_back(chosen.first + chosen.second);
          ++k;
        } else {
          out.push_back(w[k]);
        }
      }
      w = std::move(out);
    }
  }
  return merges;
}

std::vector<std::string> random_strings(testing::Rng& rng, std::size_t n, const std::string& alphabet,
                                        std::size_t max_len) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    for (std::size_t k = 0, len = testing::pick(rng, max_len + 1); k < len; ++k)
      s += alphabet[testing::pick(rng, alphabet.size())];
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("vocabulary layout") {
  const Vocabulary v;
  CHECK(v.size() == 267);
  CHECK(v.size() == static_cast<std::size_t>(kCharLevelSize));
  CHECK(special_names().size() == 11);
  CHECK(special_names()[kBos] == "<bos>");
  CHECK(v.display(kNist) == "<nist>");
  CHECK(v.bytes(Vocabulary::byte_id('C')) == "C");
  CHECK_THROWS_AS(v.bytes(kPad), UnknownToken);
  CHECK_THROWS_AS(v.bytes(267), UnknownToken);
}

TEST_CASE("training: first merge of the only pair") {
  const std::vector<std::string> corpus{"CCCC", "CCCC"};
  const auto t = train_bpe(corpus, 2);
  REQUIRE_FALSE(t.model.merges.empty());
  const auto cc = std::make_pair(Vocabulary::byte_id('C'), Vocabulary::byte_id('C'));
  CHECK(t.model.merges[0] == cc);
  CHECK(t.vocab.bytes(kCharLevelSize) == "CC");
}

TEST_CASE("training: min_frequency above the corpus size gives the char-level vocabulary") {
  const std::vector<std::string> corpus{"CCO", "c1ccccc1", "CC(=O)O"};
  const auto t = train_bpe(corpus, 1000000);
  CHECK(t.model.merges.empty());
  CHECK(t.vocab.size() == 267);
  CHECK(t.vocab == char_level().vocab);
}

TEST_CASE("training: errors") {
  CHECK_THROWS_AS(train_bpe(std::vector<std::string>{}, 2), EmptyCorpus);
  CHECK_THROWS_AS(train_bpe(std::vector<std::string>{"CC"}, 0), ConfigError);
}

TEST_CASE("training: agrees with the recount-from-scratch reference") {
  testing::Rng rng(31);
  for (int round = 0; round < 60; ++round) {
    const auto corpus = random_strings(rng, 1 + testing::pick(rng, 25), round % 2 ? "CCCO(=)1c" : "ab", 14);
    const int mf = 1 + static_cast<int>(testing::pick(rng, 4));
    bool any = false;
    for (const auto& s : corpus) any = any || !s.empty();
    if (!any) continue;
    const auto t = train_bpe(corpus, mf);
    const auto ref = naive_bpe(corpus, mf);
    REQUIRE(t.model.merges.size() == ref.size());
    for (std::size_t r = 0; r < ref.size(); ++r) {
      CHECK(t.vocab.bytes(t.model.merges[r].first) == ref[r].first);
      CHECK(t.vocab.bytes(t.model.merges[r].second) == ref[r].second);
    }
  }
}

TEST_CASE("training: max_merges caps the vocabulary") {
  const std::vector<std::string> corpus{"CCCCCCCC", "OCCO", "CCOCC"};
  TrainOptions o;
  o.min_frequency = 1;
  o.max_merges = 3;
  CHECK(train_bpe(corpus, o).model.merges.size() == 3);
}

TEST_CASE("replay equals the training-time segmentation") {
  testing::Rng rng(4);
  std::vector<std::string> corpus;
  for (int i = 0; i < 500; ++i) corpus.push_back(chem::to_smiles(testing::random_molecule(rng)));
  for (int mf : {2, 5, 50}) {
    std::vector<std::vector<int>> seg;
    const auto t = train_bpe(corpus, {mf, 0}, &seg);
    REQUIRE(seg.size() == corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) CHECK(segment(corpus[i], t.vocab, t.model) == seg[i]);
  }
}

TEST_CASE("encode and decode") {
  const auto c = char_level();
  const auto ids = encode("C", c.vocab, c.model, io::Source::nist());
  CHECK(ids == std::vector<int>{kBos, kNist, Vocabulary::byte_id('C'), kEos});
  CHECK(encode("", c.vocab, c.model, io::Source::rassp()) == std::vector<int>{kBos, kRassp, kEos});
  CHECK_THROWS_AS(encode("C", c.vocab, c.model, io::Source{}), UnknownSource);
  CHECK_THROWS_AS(source_token(io::Source::other("x")), UnknownSource);
  CHECK(source_token(io::Source::neims()) == kNeims);

  testing::Rng rng(12);
  std::vector<std::string> corpus;
  for (int i = 0; i < 300; ++i) corpus.push_back(chem::to_smiles(testing::random_molecule(rng)));
  const auto t = train_bpe(corpus, 3);
  for (const auto& s : corpus) CHECK(decode(encode(s, t.vocab, t.model, io::Source::nist()), t.vocab) == s);
  // Strings never seen in training, including arbitrary bytes.
  for (int i = 0; i < 200; ++i) {
    std::string s;
    for (std::size_t k = 0, n = testing::pick(rng, 30); k < n; ++k) s += static_cast<char>(testing::pick(rng, 256));
    CHECK(decode(encode(s, t.vocab, t.model, io::Source::neims()), t.vocab) == s);
  }
  const std::vector<int> bad{kBos, 100000};
  CHECK_THROWS_AS(decode(bad, t.vocab), UnknownToken);
}

TEST_CASE("vocabulary size shrinks as min_frequency grows") {
  testing::Rng rng(6);
  std::vector<std::string> corpus;
  for (int i = 0; i < 2000; ++i) corpus.push_back(chem::to_smiles(testing::random_molecule(rng)));
  std::size_t prev = static_cast<std::size_t>(-1);
  for (int mf : {2, 10, 100, 1000, 100000}) {
    const auto size = train_bpe(corpus, mf).vocab.size();
    CHECK(size <= prev);
    CHECK(size >= 267);
    prev = size;
  }
  CHECK(prev == 267);
}

TEST_CASE("save and load") {
  const std::vector<std::string> corpus{"CCO", "CCCO", "c1ccccc1", "CC(=O)O", "CC(=O)OC"};
  const auto t = train_bpe(corpus, 2);
  std::stringstream s;
  save(t, s);
  const auto text = s.str();
  CHECK(text.rfind("specid-bpe 1", 0) == 0);
  const auto back = load(s);
  CHECK(back == t);

  std::istringstream garbage("hello\n");
  CHECK_THROWS_AS(load(garbage), FormatError);
  auto truncated = text.substr(0, text.find("#merges"));
  std::istringstream cut(truncated);
  CHECK_THROWS_AS(load(cut), FormatError);
  auto bad_merge = text + "5 100000\n";
  std::istringstream extra(bad_merge);
  CHECK_THROWS_AS(load(extra), FormatError);
}
