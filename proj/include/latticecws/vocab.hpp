#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "latticecws/corpus.hpp"
#include "latticecws/tensor.hpp"

namespace latticecws {

// Dense symbol index. Index 0 is reserved for unknown symbols.
class Vocab {
 public:
  static constexpr std::size_t kUnknown = 0;
  static constexpr std::string_view kUnknownSymbol = "<unk>";
  static constexpr std::string_view kSentenceEnd = "</s>";

  Vocab();

  std::size_t add(std::string_view symbol);
  // kUnknown for unseen symbols.
  std::size_t index(std::string_view symbol) const;
  bool contains(std::string_view symbol) const;
  const std::string& symbol(std::size_t i) const { return symbols_.at(i); }
  std::size_t size() const noexcept { return symbols_.size(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }

  // Rebuilds from an index-ordered symbol list whose first entry is kUnknownSymbol.
  static Vocab from_symbols(std::span<const std::string> symbols);

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::size_t> index_;
};

std::string unigram_key(const std::u32string& chars, std::size_t i);
// c_i c_{i+1}, with the sentence-end sentinel after the last character.
std::string bigram_key(const std::u32string& chars, std::size_t i);

struct CharVocabs {
  Vocab unigrams;
  Vocab bigrams;
};

CharVocabs build_vocabs(std::span<const LabeledSentence> corpus);

struct EmbeddingTable {
  Vocab vocab;
  Tensor vectors;  // [|vocab|, dim]
  std::size_t dim = 0;

  // Rows uniform in [-sqrt(3/dim), sqrt(3/dim)].
  static EmbeddingTable random(std::string name, Vocab vocab, std::size_t dim, Rng& rng);
};

struct EmbeddingCoverage {
  std::size_t from_file = 0;
  std::size_t total = 0;
};

// Reads "token v_1 ... v_dim" rows (an optional "count dim" header is
// skipped). Vocab entries absent from the file keep random rows.
// An empty path yields a purely random table.
std::pair<EmbeddingTable, EmbeddingCoverage> load_embeddings(const std::filesystem::path& path,
                                                              std::string name, Vocab vocab,
                                                              std::size_t dim, Rng& rng);

}  // namespace latticecws
