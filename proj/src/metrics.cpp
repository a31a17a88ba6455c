#include "latticecws/metrics.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "latticecws/errors.hpp"

namespace latticecws {

namespace {

Real ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<Real>(num) / static_cast<Real>(den);
}

Real f1_of(Real p, Real r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

Real f1_of(const SpanCounts& c) { return f1_of(ratio(c.correct, c.predicted), ratio(c.correct, c.gold)); }

void check_aligned(std::span<const LabeledSentence> gold, std::span<const std::vector<Tag>> predicted) {
  if (gold.size() != predicted.size()) {
    throw DataError("evaluation: " + std::to_string(gold.size()) + " gold sentences but " +
                    std::to_string(predicted.size()) + " predictions");
  }
}

}  // namespace

WordSet training_words(std::span<const LabeledSentence> corpus) {
  WordSet words;
  for (const auto& s : corpus) {
    for (auto& w : words_of(s)) words.insert(std::move(w));
  }
  return words;
}

SpanCounts& SpanCounts::operator+=(const SpanCounts& o) {
  gold += o.gold;
  predicted += o.predicted;
  correct += o.correct;
  iv_gold += o.iv_gold;
  iv_correct += o.iv_correct;
  oov_gold += o.oov_gold;
  oov_correct += o.oov_correct;
  return *this;
}

SpanCounts count_spans(const LabeledSentence& gold, std::span<const Tag> predicted, const WordSet& train_words) {
  if (gold.labels.size() != predicted.size()) {
    throw DataError("evaluation: sentence of " + std::to_string(gold.labels.size()) + " characters has " +
                    std::to_string(predicted.size()) + " predicted labels");
  }
  const auto gold_spans = bmes_spans(gold.labels);
  const auto pred_spans = bmes_spans(predicted);
  SpanCounts c;
  c.gold = gold_spans.size();
  c.predicted = pred_spans.size();
  // Both span lists are sorted and non-overlapping.
  std::size_t j = 0;
  for (const auto& g : gold_spans) {
    while (j < pred_spans.size() && pred_spans[j].begin < g.begin) ++j;
    const bool hit = j < pred_spans.size() && pred_spans[j] == g;
    if (hit) ++c.correct;
    const bool iv = train_words.contains(gold.chars.substr(g.begin, g.end - g.begin));
    if (iv) {
      ++c.iv_gold;
      c.iv_correct += hit;
    } else {
      ++c.oov_gold;
      c.oov_correct += hit;
    }
  }
  return c;
}

EvalReport make_report(const SpanCounts& counts) {
  EvalReport r;
  r.counts = counts;
  r.precision = ratio(counts.correct, counts.predicted);
  r.recall = ratio(counts.correct, counts.gold);
  r.f1 = f1_of(r.precision, r.recall);
  r.r_iv = ratio(counts.iv_correct, counts.iv_gold);
  r.r_oov = ratio(counts.oov_correct, counts.oov_gold);
  return r;
}

EvalReport evaluate_f1(std::span<const LabeledSentence> gold, std::span<const std::vector<Tag>> predicted,
                       const WordSet& train_words) {
  check_aligned(gold, predicted);
  SpanCounts total;
  for (std::size_t i = 0; i < gold.size(); ++i) total += count_spans(gold[i], predicted[i], train_words);
  return make_report(total);
}

Real error_reduction(Real baseline_f1, Real candidate_f1, Real perfect) {
  if (!(perfect > baseline_f1)) throw UsageError("error reduction undefined for a perfect baseline");
  return (candidate_f1 - baseline_f1) / (perfect - baseline_f1);
}

std::vector<BucketReport> length_bucket_f1(std::span<const LabeledSentence> gold,
                                           std::span<const std::vector<Tag>> predicted, std::size_t width) {
  if (width == 0) throw UsageError("bucket width must be at least 1");
  check_aligned(gold, predicted);
  const WordSet none;
  std::map<std::size_t, BucketReport> buckets;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto len = gold[i].chars.size();
    if (len == 0) continue;
    const auto k = (len - 1) / width;
    auto& b = buckets[k];
    b.min_length = k * width + 1;
    b.max_length = (k + 1) * width;
    ++b.sentences;
    b.counts += count_spans(gold[i], predicted[i], none);
  }
  std::vector<BucketReport> out;
  for (auto& [k, b] : buckets) {
    b.f1 = f1_of(b.counts);
    out.push_back(b);
  }
  return out;
}

CoverageReport make_coverage(std::size_t word_count, std::size_t matched_count) {
  return {word_count, matched_count, ratio(matched_count, word_count)};
}

CoverageReport coverage_report(std::span<const LabeledSentence> gold, const Lexicon& lexicon) {
  std::size_t words = 0;
  std::size_t matched = 0;
  for (const auto& s : gold) {
    for (const auto& sp : bmes_spans(s.labels)) {
      ++words;
      matched += lexicon.contains(std::u32string_view(s.chars).substr(sp.begin, sp.end - sp.begin));
    }
  }
  return make_coverage(words, matched);
}

void write_report(std::ostream& out, const EvalReport& r) {
  out << "precision=" << r.precision << '\n'
      << "recall=" << r.recall << '\n'
      << "f1=" << r.f1 << '\n'
      << "r_iv=" << r.r_iv << '\n'
      << "r_oov=" << r.r_oov << '\n'
      << "gold_words=" << r.counts.gold << '\n'
      << "predicted_words=" << r.counts.predicted << '\n'
      << "correct_words=" << r.counts.correct << '\n'
      << "epoch=" << r.epoch << '\n';
  if (r.error_reduction) {
    out << "baseline=" << r.baseline_name << '\n' << "error_reduction=" << *r.error_reduction << '\n';
  }
}

void write_coverage(std::ostream& out, const CoverageReport& c) {
  out << "words=" << c.word_count << '\n' << "matched=" << c.matched_count << '\n' << "ratio=" << c.ratio << '\n';
}

void write_buckets_tsv(std::ostream& out, std::span<const BucketReport> buckets) {
  out << "min_length\tmax_length\tsentences\tgold\tpredicted\tcorrect\tf1\n";
  for (const auto& b : buckets) {
    out << b.min_length << '\t' << b.max_length << '\t' << b.sentences << '\t' << b.counts.gold << '\t'
        << b.counts.predicted << '\t' << b.counts.correct << '\t' << b.f1 << '\n';
  }
}

}  // namespace latticecws
