#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "latticecws/errors.hpp"

using namespace latticecws;

int main(int argc, char** argv) {
  CLI::App app{"Lattice LSTM-CRF Chinese word segmentation"};
  app.require_subcommand(1);

  cli::TrainOptions train;
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  std::size_t hidden = 0;
  auto* t = app.add_subcommand("train", "train a segmenter and write a checkpoint directory");
  t->add_option("--train", train.train, "segmented training corpus")->required();
  t->add_option("--dev", train.dev, "segmented development corpus")->required();
  t->add_option("--mode", train.mode, "baseline | lattice-word | lattice-subword");
  t->add_option("--lexicon", train.lexicon, "word or subword lexicon (lattice modes)");
  t->add_option("--unigram-emb", train.unigram_emb, "pretrained character embeddings");
  t->add_option("--bigram-emb", train.bigram_emb, "pretrained bigram embeddings");
  t->add_option("--lexicon-emb", train.lexicon_emb, "pretrained word/subword embeddings");
  t->add_option("--config", train.config, "key=value config file");
  t->add_option("--out", train.out, "checkpoint directory")->required();
  auto* seed_opt = t->add_option("--seed", seed, "random seed");
  auto* epochs_opt = t->add_option("--epochs", epochs, "training epochs");
  auto* hidden_opt = t->add_option("--hidden", hidden, "LSTM hidden size");

  cli::SegmentOptions seg;
  auto* s = app.add_subcommand("segment", "segment raw text with a checkpoint");
  s->add_option("--model", seg.model, "checkpoint directory")->required();
  s->add_option("--input", seg.input, "raw UTF-8 text, one sentence per line")->required();
  s->add_option("--output", seg.output, "output file")->required();

  cli::EvalOptions ev;
  double baseline_f1 = 0.0;
  auto* e = app.add_subcommand("eval", "word-level P/R/F1 with IV/OOV recall");
  e->add_option("--model", ev.model, "checkpoint directory");
  e->add_option("--gold", ev.gold, "segmented gold corpus")->required();
  e->add_option("--pred", ev.pred, "segmented prediction file (skips decoding)");
  e->add_option("--bucket-width", ev.bucket_width, "sentence-length bucket width");
  e->add_option("--buckets-out", ev.buckets_out, "per-length-bucket F1 table (TSV)");
  auto* base_opt = e->add_option("--baseline-f1", baseline_f1, "baseline F1 in [0,1] for error reduction");
  e->add_option("--baseline-name", ev.baseline_name, "label of the baseline");

  cli::BpeLearnOptions bpe;
  auto* b = app.add_subcommand("bpe-learn", "learn BPE merges and a subword lexicon");
  b->add_option("--corpus", bpe.corpus, "text corpus, one sentence per line")->required();
  b->add_option("--merges", bpe.merges, "merge budget");
  b->add_option("--out", bpe.out, "model file")->required();
  b->add_option("--lexicon-out", bpe.lexicon_out, "lexicon file (default <out>.lexicon)");

  cli::CoverageOptions cov;
  auto* c = app.add_subcommand("coverage", "share of gold words present in a lexicon");
  c->add_option("--gold", cov.gold, "segmented gold corpus")->required();
  c->add_option("--lexicon", cov.lexicon, "lexicon file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }

  try {
    if (t->parsed()) {
      if (*seed_opt) train.seed = seed;
      if (*epochs_opt) train.epochs = epochs;
      if (*hidden_opt) train.hidden = hidden;
      if (t->count("--mode") == 0) train.mode.clear();
      cli::run_train(train, std::cout, std::cerr);
    } else if (s->parsed()) {
      cli::run_segment(seg, std::cout, std::cerr);
    } else if (e->parsed()) {
      if (*base_opt) ev.baseline_f1 = baseline_f1;
      cli::run_eval(ev, std::cout, std::cerr);
    } else if (b->parsed()) {
      cli::run_bpe_learn(bpe, std::cout, std::cerr);
    } else if (c->parsed()) {
      cli::run_coverage(cov, std::cout, std::cerr);
    }
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return static_cast<int>(err.code());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return static_cast<int>(ExitCode::data);
  }
  return 0;
}
