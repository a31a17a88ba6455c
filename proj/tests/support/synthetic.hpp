#pragma once

// Deterministic toy corpus: sentences drawn from a fixed word vocabulary with
// Zipf-like frequencies. Words are built from a small shared character pool so
// that characters are ambiguous between word positions.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "latticecws/corpus.hpp"

namespace latticecws::testing {

struct SyntheticCorpus {
  std::vector<std::u32string> vocabulary;
  std::vector<LabeledSentence> train;
  std::vector<LabeledSentence> dev;
};

struct SyntheticSpec {
  std::size_t sentences = 2000;
  std::size_t vocabulary = 300;
  std::size_t char_pool = 120;
  std::size_t min_words = 4;
  std::size_t max_words = 12;
  double dev_fraction = 0.1;
  std::uint64_t seed = 20180829;
};

inline SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec = {}) {
  std::mt19937_64 rng(spec.seed);
  const char32_t base = 0x4E00 + 0x100;
  std::uniform_int_distribution<std::size_t> pick_char(0, spec.char_pool - 1);
  std::discrete_distribution<int> pick_len({0.0, 0.15, 0.5, 0.25, 0.1});

  SyntheticCorpus out;
  std::set<std::u32string> seen;
  while (out.vocabulary.size() < spec.vocabulary) {
    const int len = pick_len(rng);
    std::u32string w;
    for (int k = 0; k < len; ++k) w.push_back(base + static_cast<char32_t>(pick_char(rng)));
    if (seen.insert(w).second) out.vocabulary.push_back(w);
  }

  std::vector<double> weights(spec.vocabulary);
  for (std::size_t r = 0; r < weights.size(); ++r) weights[r] = 1.0 / static_cast<double>(r + 1);
  std::discrete_distribution<std::size_t> pick_word(weights.begin(), weights.end());
  std::uniform_int_distribution<std::size_t> pick_count(spec.min_words, spec.max_words);

  std::vector<LabeledSentence> all;
  for (std::size_t s = 0; s < spec.sentences; ++s) {
    std::vector<std::u32string> words(pick_count(rng));
    for (auto& w : words) w = out.vocabulary[pick_word(rng)];
    all.push_back(to_bmes(words));
  }
  const auto dev_count = static_cast<std::size_t>(static_cast<double>(spec.sentences) * spec.dev_fraction);
  out.dev.assign(all.end() - static_cast<std::ptrdiff_t>(dev_count), all.end());
  out.train.assign(all.begin(), all.end() - static_cast<std::ptrdiff_t>(dev_count));
  return out;
}

}  // namespace latticecws::testing
