#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "latticecws/corpus.hpp"
#include "latticecws/lexicon.hpp"
#include "latticecws/tensor.hpp"

namespace latticecws {

using WordSet = std::unordered_set<std::u32string>;

WordSet training_words(std::span<const LabeledSentence> corpus);

// Word-span counts; additive over any partition of a corpus.
struct SpanCounts {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t correct = 0;
  std::size_t iv_gold = 0;
  std::size_t iv_correct = 0;
  std::size_t oov_gold = 0;
  std::size_t oov_correct = 0;

  SpanCounts& operator+=(const SpanCounts& o);
  friend bool operator==(const SpanCounts&, const SpanCounts&) = default;
};

SpanCounts count_spans(const LabeledSentence& gold, std::span<const Tag> predicted, const WordSet& train_words);

struct EvalReport {
  Real precision = 0.0;
  Real recall = 0.0;
  Real f1 = 0.0;
  Real r_iv = 0.0;
  Real r_oov = 0.0;
  SpanCounts counts;
  std::size_t epoch = 0;
  std::optional<Real> error_reduction;  // vs `baseline_name`, fraction of residual error
  std::string baseline_name;
};

// Rates from counts; a rate with an empty denominator is 0.
EvalReport make_report(const SpanCounts& counts);

// A predicted word is correct iff the same span exists in gold. R_IV / R_OOV
// split gold words by membership in `train_words`.
EvalReport evaluate_f1(std::span<const LabeledSentence> gold, std::span<const std::vector<Tag>> predicted,
                       const WordSet& train_words);

// (candidate - baseline) / (perfect - baseline); both F1 on the scale of `perfect`.
Real error_reduction(Real baseline_f1, Real candidate_f1, Real perfect = 1.0);

struct BucketReport {
  std::size_t min_length = 0;  // inclusive, characters
  std::size_t max_length = 0;  // inclusive
  std::size_t sentences = 0;
  SpanCounts counts;
  Real f1 = 0.0;
};

// Bucket k holds sentences of length in [k*width + 1, (k+1)*width]; empty buckets are omitted.
std::vector<BucketReport> length_bucket_f1(std::span<const LabeledSentence> gold,
                                           std::span<const std::vector<Tag>> predicted, std::size_t width);

struct CoverageReport {
  std::size_t word_count = 0;
  std::size_t matched_count = 0;
  Real ratio = 0.0;
};

CoverageReport make_coverage(std::size_t word_count, std::size_t matched_count);
// Token-level share of gold words present in the lexicon.
CoverageReport coverage_report(std::span<const LabeledSentence> gold, const Lexicon& lexicon);

void write_report(std::ostream& out, const EvalReport& r);
void write_coverage(std::ostream& out, const CoverageReport& c);
void write_buckets_tsv(std::ostream& out, std::span<const BucketReport> buckets);

}  // namespace latticecws
