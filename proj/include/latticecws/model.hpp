#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latticecws/corpus.hpp"
#include "latticecws/crf.hpp"
#include "latticecws/encoder.hpp"
#include "latticecws/lexicon.hpp"
#include "latticecws/vocab.hpp"

namespace latticecws {

enum class ModelMode { baseline, lattice_word, lattice_subword };

std::string_view to_string(ModelMode mode);
// Throws ConfigError for unknown names.
ModelMode parse_mode(std::string_view name);

struct ModelConfig {
  ModelMode mode = ModelMode::baseline;
  std::size_t unigram_dim = 50;
  std::size_t bigram_dim = 50;
  std::size_t lexicon_dim = 50;
  std::size_t hidden = 200;
  Real char_dropout = 0.5;
  Real lattice_dropout = 0.5;
  std::size_t max_match_length = 0;  // 0 = unbounded

  bool lattice() const noexcept { return mode != ModelMode::baseline; }
};

// Embedding tables, bidirectional (lattice) encoder and CRF.
class Model {
 public:
  // `lexicon` and `lexicon_embeddings` are required in lattice modes and
  // ignored otherwise. The lexicon table must contain every trie entry.
  static Model create(const ModelConfig& config, EmbeddingTable unigrams, EmbeddingTable bigrams,
                      std::optional<Lexicon> lexicon, std::optional<EmbeddingTable> lexicon_embeddings, Rng& rng);

  const ModelConfig& config() const noexcept { return config_; }
  const EmbeddingTable& unigrams() const noexcept { return unigrams_; }
  const EmbeddingTable& bigrams() const noexcept { return bigrams_; }
  const std::optional<Lexicon>& lexicon() const noexcept { return lexicon_; }
  const std::optional<EmbeddingTable>& lexicon_embeddings() const noexcept { return lexicon_embeddings_; }
  EncoderParams& encoder() noexcept { return encoder_; }
  CrfParams& crf() noexcept { return crf_; }

  // Every trainable tensor, in a fixed order.
  ParamList parameters();

  // Lexicon matches of a sentence; empty in baseline mode.
  LatticeMatchSet matches(std::u32string_view chars) const;

  struct Forward {
    std::vector<Var> emissions;
    Encoding encoding;
  };
  Forward forward(Tape& tape, const std::u32string& chars, const LatticeMatchSet& matches, Mode mode, Rng& rng);
  Var loss(Tape& tape, const LabeledSentence& sentence, const LatticeMatchSet& matches, Mode mode, Rng& rng);

  // Eval-mode emission scores, m x 4.
  Emissions emissions(const std::u32string& chars);
  LabelPath decode(const std::u32string& chars);

  // Snapshot / restore of every parameter value.
  std::vector<std::vector<Real>> snapshot();
  void restore(const std::vector<std::vector<Real>>& values);

 private:
  ModelConfig config_;
  EmbeddingTable unigrams_;
  EmbeddingTable bigrams_;
  std::optional<Lexicon> lexicon_;
  std::optional<EmbeddingTable> lexicon_embeddings_;
  std::vector<std::size_t> entry_rows_;  // trie entry id -> lexicon table row
  EncoderParams encoder_;
  CrfParams crf_;
};

}  // namespace latticecws
