#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace latticecws::cli {

struct TrainOptions {
  std::string train;
  std::string dev;
  std::string mode = "baseline";
  std::string lexicon;
  std::string unigram_emb;
  std::string bigram_emb;
  std::string lexicon_emb;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> hidden;
};

struct SegmentOptions {
  std::string model;
  std::string input;
  std::string output;
};

struct EvalOptions {
  std::string model;
  std::string gold;
  std::string pred;  // evaluate a segmented file instead of decoding
  std::size_t bucket_width = 10;
  std::string buckets_out;
  std::optional<double> baseline_f1;
  std::string baseline_name = "baseline";
};

struct BpeLearnOptions {
  std::string corpus;
  std::size_t merges = 10000;
  std::string out;
  std::string lexicon_out;  // defaults to <out>.lexicon
};

struct CoverageOptions {
  std::string gold;
  std::string lexicon;
};

// Each command writes results/reports to `out` and diagnostics to `err`, and
// throws latticecws::Error subclasses on failure.
void run_train(const TrainOptions& o, std::ostream& out, std::ostream& err);
void run_segment(const SegmentOptions& o, std::ostream& out, std::ostream& err);
void run_eval(const EvalOptions& o, std::ostream& out, std::ostream& err);
void run_bpe_learn(const BpeLearnOptions& o, std::ostream& out, std::ostream& err);
void run_coverage(const CoverageOptions& o, std::ostream& out, std::ostream& err);

}  // namespace latticecws::cli
