#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "latticecws/corpus.hpp"
#include "latticecws/errors.hpp"
#include "latticecws/utf8.hpp"
#include "latticecws/vocab.hpp"

using namespace latticecws;
namespace fs = std::filesystem;

namespace {

std::vector<std::u32string> W(std::initializer_list<const char*> words) {
  std::vector<std::u32string> out;
  for (auto* w : words) out.push_back(utf8::decode(w));
  return out;
}

std::vector<Tag> tags(const char* s) {
  std::vector<Tag> out;
  for (; *s; ++s) {
    switch (*s) {
      case 'B': out.push_back(Tag::B); break;
      case 'M': out.push_back(Tag::M); break;
      case 'E': out.push_back(Tag::E); break;
      default: out.push_back(Tag::S); break;
    }
  }
  return out;
}

std::string tag_string(std::span<const Tag> t) {
  std::string s;
  for (auto x : t) s += tag_char(x);
  return s;
}

fs::path temp_file(const std::string& name, const std::string& content) {
  auto dir = fs::temp_directory_path() / "latticecws_test_data";
  fs::create_directories(dir);
  auto p = dir / name;
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

}  // namespace

TEST_CASE("to_bmes") {
  CHECK(tag_string(to_bmes(W({"人"})).labels) == "S");
  CHECK(tag_string(to_bmes(W({"中国", "人"})).labels) == "BES");
  CHECK(tag_string(to_bmes(W({"科学院"})).labels) == "BME");
  CHECK(to_bmes(W({"中国", "人"})).chars == utf8::decode("中国人"));
  try {
    to_bmes(W({"中国", ""}), 17);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("17") != std::string::npos);
    CHECK(e.code() == ExitCode::data);
  }
}

TEST_CASE("from_bmes and the repair rule") {
  const auto chars = utf8::decode("中国人");
  CHECK(from_bmes(chars, tags("BES")) == W({"中国", "人"}));
  CHECK(from_bmes(chars, tags("BBE")) == W({"中", "国人"}));
  CHECK(from_bmes(chars, tags("MES")) == W({"中国", "人"}));
  CHECK(from_bmes(chars, tags("EEE")) == W({"中", "国", "人"}));
  CHECK(from_bmes(chars, tags("BMM")) == W({"中国人"}));
  CHECK(from_bmes(chars, tags("SMS")) == W({"中", "国", "人"}));
  CHECK(from_bmes(U"", {}).empty());
  CHECK_THROWS_AS(from_bmes(chars, tags("BE")), DimensionError);
}

TEST_CASE("round-trip over random partitions") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> len(1, 5);
  std::uniform_int_distribution<int> count(1, 12);
  std::uniform_int_distribution<char32_t> ch(0x4E00, 0x4E40);
  for (int t = 0; t < 2000; ++t) {
    std::vector<std::u32string> words(static_cast<std::size_t>(count(rng)));
    for (auto& w : words) {
      const int n = len(rng);
      for (int k = 0; k < n; ++k) w.push_back(ch(rng));
    }
    const auto s = to_bmes(words);
    REQUIRE(s.chars.size() == s.labels.size());
    REQUIRE(from_bmes(s.chars, s.labels) == words);
  }
}

TEST_CASE("decoding any label sequence partitions the characters") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> tag(0, 3);
  std::uniform_int_distribution<int> len(1, 20);
  const auto alphabet = utf8::decode("甲乙丙丁戊己庚辛壬癸子丑寅卯辰巳午未申酉");
  for (int t = 0; t < 2000; ++t) {
    const auto m = static_cast<std::size_t>(len(rng));
    std::u32string chars(alphabet.begin(), alphabet.begin() + static_cast<std::ptrdiff_t>(m));
    std::vector<Tag> labels(m);
    for (auto& l : labels) l = static_cast<Tag>(tag(rng));
    const auto words = from_bmes(chars, labels);
    std::u32string joined;
    for (const auto& w : words) {
      REQUIRE(!w.empty());
      joined += w;
    }
    REQUIRE(joined == chars);
    const auto spans = bmes_spans(labels);
    REQUIRE(spans.size() == words.size());
    REQUIRE(spans.back().end == m);
  }
}

TEST_CASE("read_segmented") {
  std::istringstream in("中国 人\n\n  科学院 院士 \r\n好\n");
  const auto corpus = read_segmented(in);
  REQUIRE(corpus.size() == 3);
  CHECK(words_of(corpus[0]) == W({"中国", "人"}));
  CHECK(words_of(corpus[1]) == W({"科学院", "院士"}));
  CHECK(tag_string(corpus[2].labels) == "S");

  std::istringstream doubled("中国 人\n中国  人\n");
  try {
    read_segmented(doubled);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream broken("ok\n\xff\xfe\n");
  CHECK_THROWS_AS(read_segmented(broken), DataError);
  CHECK_THROWS_AS(read_segmented_file("/nonexistent/corpus.txt"), DataError);
  CHECK(join_words(W({"中国", "人"})) == "中国 人");
}

TEST_CASE("utf8") {
  CHECK(utf8::decode("a中\xF0\x9F\x98\x80") == U"a中\U0001F600");
  CHECK(utf8::encode(U"a中\U0001F600") == "a中\xF0\x9F\x98\x80");
  CHECK_THROWS_AS(utf8::decode("\xC0\xAF"), DataError);
  CHECK_THROWS_AS(utf8::decode("\xED\xA0\x80"), DataError);
  CHECK_THROWS_AS(utf8::decode("\xE4\xB8"), DataError);
}

TEST_CASE("build_vocabs") {
  SUBCASE("two characters") {
    std::vector<LabeledSentence> c{to_bmes(std::vector<std::u32string>{U"ab"})};
    auto v = build_vocabs(c);
    CHECK(v.unigrams.size() == 3);
    CHECK(v.unigrams.contains("a"));
    CHECK(v.unigrams.contains("b"));
    CHECK(v.bigrams.size() == 3);
    CHECK(v.bigrams.contains("ab"));
    CHECK(v.bigrams.contains("b</s>"));
  }
  SUBCASE("one character") {
    std::vector<LabeledSentence> c{to_bmes(std::vector<std::u32string>{U"a"})};
    auto v = build_vocabs(c);
    CHECK(v.bigrams.symbols() == std::vector<std::string>{"<unk>", "a</s>"});
  }
  SUBCASE("duplicates add nothing") {
    std::vector<LabeledSentence> one{to_bmes(W({"中国", "人"}))};
    std::vector<LabeledSentence> two{one[0], one[0]};
    CHECK(build_vocabs(one).unigrams.symbols() == build_vocabs(two).unigrams.symbols());
    CHECK(build_vocabs(one).bigrams.symbols() == build_vocabs(two).bigrams.symbols());
  }
  SUBCASE("bigram keys are two symbols") {
    std::vector<LabeledSentence> c{to_bmes(W({"中国", "人", "科学院"}))};
    auto v = build_vocabs(c);
    for (std::size_t i = 1; i < v.bigrams.size(); ++i) {
      const auto s = v.bigrams.symbol(i);
      const auto chars = utf8::decode(s);
      const bool sentinel = s.ends_with(Vocab::kSentenceEnd);
      CHECK((sentinel ? chars.size() - Vocab::kSentenceEnd.size() + 1 : chars.size()) == 2);
    }
  }
}

TEST_CASE("vocab") {
  Vocab v;
  CHECK(v.size() == 1);
  CHECK(v.add("x") == 1);
  CHECK(v.add("x") == 1);
  CHECK(v.index("unseen") == Vocab::kUnknown);
  const auto copy = Vocab::from_symbols(v.symbols());
  CHECK(copy.symbols() == v.symbols());
  std::vector<std::string> bad{"x"};
  CHECK_THROWS_AS(Vocab::from_symbols(bad), DataError);
}

TEST_CASE("load_embeddings") {
  Vocab v;
  v.add("中");
  v.add("国");
  const Real bound = std::sqrt(3.0 / 50);
  Rng rng(1);

  SUBCASE("no file or empty file gives random rows in bound") {
    for (const fs::path p : {fs::path(), temp_file("empty.vec", "")}) {
      auto [table, cov] = load_embeddings(p, "emb", v, 50, rng);
      CHECK(table.vectors.rows() == 3);
      CHECK(cov.from_file == 0);
      for (auto x : table.vectors.data()) CHECK(std::abs(x) <= bound);
    }
  }
  SUBCASE("file rows are copied exactly") {
    std::string row = "中";
    for (int i = 0; i < 50; ++i) row += " 0.1";
    auto p = temp_file("rows.vec", "2 50\n" + row + "\n其他" + row.substr(3) + "\n");
    auto [table, cov] = load_embeddings(p, "emb", v, 50, rng);
    CHECK(cov.from_file == 1);
    CHECK(cov.total == 3);
    for (auto x : table.vectors.row(v.index("中"))) CHECK(x == 0.1);
    for (auto x : table.vectors.row(v.index("国"))) CHECK(std::abs(x) <= bound);
  }
  SUBCASE("wrong dimension reports the row") {
    auto p = temp_file("bad.vec", "中 0.1 0.2\n国 0.1\n");
    try {
      load_embeddings(p, "emb", v, 2, rng);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
  }
  CHECK_THROWS_AS(load_embeddings("/nonexistent.vec", "emb", v, 2, rng), DataError);
}
