#include "latticecws/vocab.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "latticecws/errors.hpp"
#include "latticecws/utf8.hpp"

namespace latticecws {

Vocab::Vocab() { add(kUnknownSymbol); }

std::size_t Vocab::add(std::string_view symbol) {
  auto [it, inserted] = index_.try_emplace(std::string(symbol), symbols_.size());
  if (inserted) symbols_.emplace_back(symbol);
  return it->second;
}

std::size_t Vocab::index(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  return it == index_.end() ? kUnknown : it->second;
}

bool Vocab::contains(std::string_view symbol) const { return index_.contains(std::string(symbol)); }

Vocab Vocab::from_symbols(std::span<const std::string> symbols) {
  if (symbols.empty() || symbols.front() != kUnknownSymbol) {
    throw DataError("vocabulary must start with the unknown symbol");
  }
  Vocab v;
  for (std::size_t i = 1; i < symbols.size(); ++i) {
    if (v.add(symbols[i]) != i) throw DataError("duplicate vocabulary symbol '" + symbols[i] + "'");
  }
  return v;
}

std::string unigram_key(const std::u32string& chars, std::size_t i) { return utf8::encode(chars[i]); }

std::string bigram_key(const std::u32string& chars, std::size_t i) {
  auto key = utf8::encode(chars[i]);
  if (i + 1 < chars.size()) {
    key += utf8::encode(chars[i + 1]);
  } else {
    key += Vocab::kSentenceEnd;
  }
  return key;
}

CharVocabs build_vocabs(std::span<const LabeledSentence> corpus) {
  CharVocabs v;
  for (const auto& s : corpus) {
    for (std::size_t i = 0; i < s.chars.size(); ++i) {
      v.unigrams.add(unigram_key(s.chars, i));
      v.bigrams.add(bigram_key(s.chars, i));
    }
  }
  return v;
}

EmbeddingTable EmbeddingTable::random(std::string name, Vocab vocab, std::size_t dim, Rng& rng) {
  if (dim == 0) throw ConfigError("embedding dimension must be positive");
  Tensor vectors(std::move(name), {vocab.size(), dim}, true);
  vectors.fill_uniform(uniform_bound(dim), rng);
  return EmbeddingTable{std::move(vocab), std::move(vectors), dim};
}

std::pair<EmbeddingTable, EmbeddingCoverage> load_embeddings(const std::filesystem::path& path,
                                                              std::string name, Vocab vocab,
                                                              std::size_t dim, Rng& rng) {
  auto table = EmbeddingTable::random(std::move(name), std::move(vocab), dim, rng);
  EmbeddingCoverage cov{0, table.vocab.size()};
  if (path.empty()) return {std::move(table), cov};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file '" + path.string() + "'");
  std::vector<std::uint8_t> seen(table.vocab.size(), 0);
  std::string line;
  std::size_t row = 0;
  std::vector<Real> values;
  while (std::getline(in, line)) {
    ++row;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    values.clear();
    std::string num;
    while (fields >> num) {
      Real v = 0.0;
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
      if (ec != std::errc() || ptr != num.data() + num.size()) {
        throw DataError(path.string() + ": bad number '" + num + "' on row " + std::to_string(row));
      }
      values.push_back(v);
    }
    // "count dim" header
    if (row == 1 && values.size() == 1 && token.find_first_not_of("0123456789") == std::string::npos) continue;
    if (values.size() != dim) {
      throw DataError(path.string() + ": row " + std::to_string(row) + " has " + std::to_string(values.size()) +
                      " values, expected " + std::to_string(dim));
    }
    if (!table.vocab.contains(token)) continue;
    const auto idx = table.vocab.index(token);
    auto r = table.vectors.row(idx);
    std::copy(values.begin(), values.end(), r.begin());
    if (!seen[idx]) {
      seen[idx] = 1;
      ++cov.from_file;
    }
  }
  return {std::move(table), cov};
}

}  // namespace latticecws
