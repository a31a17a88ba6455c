#include "latticecws/model.hpp"

#include <algorithm>
#include <stdexcept>

#include "latticecws/errors.hpp"
#include "latticecws/utf8.hpp"

namespace latticecws {

namespace {

// Tables get fixed tensor names so checkpoints can address them.
EmbeddingTable renamed(EmbeddingTable table, const char* name) {
  Tensor t(name, table.vectors.shape(), true);
  std::copy(table.vectors.data().begin(), table.vectors.data().end(), t.data().begin());
  table.vectors = std::move(t);
  return table;
}

}  // namespace

std::string_view to_string(ModelMode mode) {
  switch (mode) {
    case ModelMode::baseline:
      return "baseline";
    case ModelMode::lattice_word:
      return "lattice-word";
    case ModelMode::lattice_subword:
      return "lattice-subword";
  }
  return "baseline";
}

ModelMode parse_mode(std::string_view name) {
  if (name == "baseline") return ModelMode::baseline;
  if (name == "lattice-word") return ModelMode::lattice_word;
  if (name == "lattice-subword") return ModelMode::lattice_subword;
  throw ConfigError("unknown mode '" + std::string(name) + "' (expected baseline, lattice-word or lattice-subword)");
}

Model Model::create(const ModelConfig& config, EmbeddingTable unigrams, EmbeddingTable bigrams,
                    std::optional<Lexicon> lexicon, std::optional<EmbeddingTable> lexicon_embeddings, Rng& rng) {
  if (config.hidden == 0) throw ConfigError("hidden size must be positive");
  if (!(config.char_dropout >= 0.0 && config.char_dropout < 1.0) ||
      !(config.lattice_dropout >= 0.0 && config.lattice_dropout < 1.0)) {
    throw ConfigError("dropout rates must lie in [0, 1)");
  }
  Model m;
  m.config_ = config;
  m.config_.unigram_dim = unigrams.dim;
  m.config_.bigram_dim = bigrams.dim;
  m.unigrams_ = renamed(std::move(unigrams), "emb.unigram");
  m.bigrams_ = renamed(std::move(bigrams), "emb.bigram");
  std::size_t lexicon_dim = 0;
  if (config.lattice()) {
    if (!lexicon || !lexicon_embeddings) throw UsageError("lattice modes require a lexicon and its embedding table");
    m.lexicon_ = std::move(lexicon);
    m.lexicon_embeddings_ = renamed(std::move(*lexicon_embeddings), "emb.lexicon");
    lexicon_dim = m.lexicon_embeddings_->dim;
    m.config_.lexicon_dim = lexicon_dim;
    const auto& trie = m.lexicon_->trie;
    m.entry_rows_.resize(trie.entry_count());
    for (std::size_t id = 0; id < trie.entry_count(); ++id) {
      const auto key = utf8::encode(trie.entry(id));
      if (!m.lexicon_embeddings_->vocab.contains(key)) {
        throw UsageError("lexicon embedding table lacks entry '" + key + "'");
      }
      m.entry_rows_[id] = m.lexicon_embeddings_->vocab.index(key);
    }
  }
  const auto input_dim = m.config_.unigram_dim + m.config_.bigram_dim;
  m.encoder_ = EncoderParams::create(input_dim, lexicon_dim, config.hidden, rng);
  m.crf_ = CrfParams::create(2 * config.hidden, rng);
  return m;
}

ParamList Model::parameters() {
  ParamList out{&unigrams_.vectors, &bigrams_.vectors};
  if (lexicon_embeddings_) out.push_back(&lexicon_embeddings_->vectors);
  for (auto* t : encoder_.parameters()) out.push_back(t);
  for (auto* t : crf_.parameters()) out.push_back(t);
  return out;
}

LatticeMatchSet Model::matches(std::u32string_view chars) const {
  if (!config_.lattice()) {
    LatticeMatchSet empty;
    empty.by_end.resize(chars.size());
    empty.by_begin.resize(chars.size());
    return empty;
  }
  return match_sentence(lexicon_->trie, chars, config_.max_match_length);
}

Model::Forward Model::forward(Tape& tape, const std::u32string& chars, const LatticeMatchSet& matches, Mode mode,
                              Rng& rng) {
  auto xs = char_repr(tape, chars, {&unigrams_, &bigrams_}, config_.char_dropout, mode, rng);
  std::vector<Var> words;
  words.reserve(matches.matches.size());
  for (const auto& mt : matches.matches) {
    if (!lexicon_embeddings_) throw std::logic_error("matches supplied to a baseline model");
    Var w = tape.lookup(lexicon_embeddings_->vectors, entry_rows_.at(mt.entry));
    if (mode == Mode::train && config_.lattice_dropout > 0.0) {
      w = scale(w, dropout_mask(w.size(), config_.lattice_dropout, mode, rng));
    }
    words.push_back(w);
  }
  Forward f;
  f.encoding = encode_bidirectional(xs, matches, words, encoder_);
  f.emissions = emission_scores(f.encoding.hidden, crf_);
  return f;
}

Var Model::loss(Tape& tape, const LabeledSentence& sentence, const LatticeMatchSet& matches, Mode mode, Rng& rng) {
  auto f = forward(tape, sentence.chars, matches, mode, rng);
  return nll_loss(f.emissions, sentence.labels, crf_.transitions);
}

Emissions Model::emissions(const std::u32string& chars) {
  if (chars.empty()) return {};
  Tape tape(false);
  Rng unused(0);
  auto f = forward(tape, chars, matches(chars), Mode::eval, unused);
  return values_of(f.emissions);
}

LabelPath Model::decode(const std::u32string& chars) {
  if (chars.empty()) return {};
  return viterbi(emissions(chars), crf_.transitions);
}

std::vector<std::vector<Real>> Model::snapshot() {
  std::vector<std::vector<Real>> out;
  for (auto* t : parameters()) out.emplace_back(t->data().begin(), t->data().end());
  return out;
}

void Model::restore(const std::vector<std::vector<Real>>& values) {
  auto params = parameters();
  if (values.size() != params.size()) throw std::logic_error("restore: parameter count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (values[i].size() != params[i]->size()) throw std::logic_error("restore: size mismatch");
    std::copy(values[i].begin(), values[i].end(), params[i]->data().begin());
  }
}

}  // namespace latticecws
