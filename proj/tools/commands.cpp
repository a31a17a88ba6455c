#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "latticecws/bpe.hpp"
#include "latticecws/checkpoint.hpp"
#include "latticecws/corpus.hpp"
#include "latticecws/errors.hpp"
#include "latticecws/lexicon.hpp"
#include "latticecws/metrics.hpp"
#include "latticecws/trainer.hpp"
#include "latticecws/utf8.hpp"

namespace latticecws::cli {

namespace fs = std::filesystem;

namespace {

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required");
  if (!fs::is_regular_file(path)) throw UsageError(std::string(flag) + " file '" + path + "' does not exist");
}

void require_optional_file(const std::string& path, const char* flag) {
  if (!path.empty()) require_file(path, flag);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

void report_coverage(std::ostream& err, const char* what, const EmbeddingCoverage& c) {
  err << what << " embeddings: " << c.from_file << "/" << c.total << " rows from file\n";
}

}  // namespace

void run_train(const TrainOptions& o, std::ostream& out, std::ostream& err) {
  require_file(o.train, "--train");
  require_file(o.dev, "--dev");
  if (o.out.empty()) throw UsageError("--out is required");
  TrainConfig config;
  if (!o.config.empty()) {
    require_file(o.config, "--config");
    apply_config_file(config, o.config);
  }
  if (!o.mode.empty()) config.model.mode = parse_mode(o.mode);
  if (o.seed) config.seed = *o.seed;
  if (o.epochs) config.epochs = *o.epochs;
  if (o.hidden) config.model.hidden = *o.hidden;
  config.validate();

  if (config.model.lattice()) {
    if (o.lexicon.empty()) throw UsageError("mode " + std::string(to_string(config.model.mode)) + " requires --lexicon");
    require_file(o.lexicon, "--lexicon");
    require_optional_file(o.lexicon_emb, "--lexicon-emb");
  } else if (!o.lexicon.empty() || !o.lexicon_emb.empty()) {
    err << "warning: baseline mode ignores --lexicon/--lexicon-emb\n";
  }
  require_optional_file(o.unigram_emb, "--unigram-emb");
  require_optional_file(o.bigram_emb, "--bigram-emb");

  const auto train_set = read_segmented_file(o.train);
  const auto dev_set = read_segmented_file(o.dev);
  if (train_set.empty()) throw DataError("training corpus '" + o.train + "' has no sentences");
  if (dev_set.empty()) throw DataError("development corpus '" + o.dev + "' has no sentences");

  if (!o.unigram_emb.empty() || !o.bigram_emb.empty() || !o.lexicon_emb.empty()) {
    config.embeddings = EmbeddingSource::pretrained;
  }
  Rng rng(config.seed);
  auto vocabs = build_vocabs(train_set);
  auto [unigrams, ucov] = load_embeddings(o.unigram_emb, "emb.unigram", std::move(vocabs.unigrams),
                                          config.model.unigram_dim, rng);
  auto [bigrams, bcov] = load_embeddings(o.bigram_emb, "emb.bigram", std::move(vocabs.bigrams),
                                         config.model.bigram_dim, rng);
  report_coverage(err, "unigram", ucov);
  report_coverage(err, "bigram", bcov);

  std::optional<Lexicon> lexicon;
  std::optional<EmbeddingTable> lexicon_table;
  if (config.model.lattice()) {
    lexicon = read_lexicon_file(o.lexicon);
    if (lexicon->trie.rejected() > 0) {
      err << "warning: " << lexicon->trie.rejected() << " single-character lexicon symbols not used for matching\n";
    }
    Vocab lv;
    for (const auto& e : lexicon->trie.entries()) lv.add(utf8::encode(e));
    auto [table, lcov] = load_embeddings(o.lexicon_emb, "emb.lexicon", std::move(lv), config.model.lexicon_dim, rng);
    report_coverage(err, "lexicon", lcov);
    lexicon_table = std::move(table);
  }

  auto model = Model::create(config.model, std::move(unigrams), std::move(bigrams), std::move(lexicon),
                             std::move(lexicon_table), rng);
  auto result = train(config, model, train_set, dev_set, rng, [&err](const EpochRecord& r) {
    err << "epoch " << r.epoch << " lr=" << r.learning_rate << " loss=" << r.train_loss << " dev_f1=" << r.dev.f1
        << " (" << r.seconds << "s)\n";
  });

  save_checkpoint(model, o.out, training_words(train_set), train_set.front().chars);
  {
    auto tsv = open_output((fs::path(o.out) / "epochs.tsv").string());
    write_epochs_tsv(tsv, result.epochs);
  }
  {
    auto rep = open_output((fs::path(o.out) / "report.txt").string());
    rep << "mode=" << to_string(config.model.mode) << '\n' << "best_epoch=" << result.best_epoch << '\n';
    write_report(rep, result.best);
  }
  out << "mode=" << to_string(config.model.mode) << '\n' << "best_epoch=" << result.best_epoch << '\n';
  write_report(out, result.best);
}

void run_segment(const SegmentOptions& o, std::ostream& out, std::ostream& err) {
  if (o.model.empty()) throw UsageError("--model is required");
  require_file(o.input, "--input");
  if (o.output.empty()) throw UsageError("--output is required");
  auto ckpt = load_checkpoint(o.model);
  const auto lines = read_raw_lines(o.input);
  std::ostringstream buffer;
  for (const auto& line : lines) {
    const auto path = ckpt.model.decode(line);
    buffer << join_words(from_bmes(line, path.labels)) << '\n';
  }
  auto file = open_output(o.output);
  file << buffer.str();
  out << "sentences=" << lines.size() << '\n';
  (void)err;
}

void run_eval(const EvalOptions& o, std::ostream& out, std::ostream& err) {
  require_file(o.gold, "--gold");
  if (o.model.empty() && o.pred.empty()) throw UsageError("eval needs --model or --pred");
  require_optional_file(o.pred, "--pred");
  if (o.bucket_width == 0) throw UsageError("--bucket-width must be at least 1");
  const auto gold = read_segmented_file(o.gold);

  WordSet train_words;
  std::vector<std::vector<Tag>> predicted;
  if (!o.pred.empty()) {
    const auto pred = read_segmented_file(o.pred);
    if (pred.size() != gold.size()) {
      throw DataError("--pred has " + std::to_string(pred.size()) + " sentences, --gold has " + std::to_string(gold.size()));
    }
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (pred[i].chars != gold[i].chars) throw DataError("sentence " + std::to_string(i + 1) + " differs between --pred and --gold");
      predicted.push_back(pred[i].labels);
    }
    if (!o.model.empty()) train_words = load_checkpoint(o.model).train_words;
  } else {
    auto ckpt = load_checkpoint(o.model);
    train_words = std::move(ckpt.train_words);
    predicted = decode_all(ckpt.model, gold);
  }
  if (train_words.empty()) err << "note: no training vocabulary available, every word counts as OOV\n";

  auto report = evaluate_f1(gold, predicted, train_words);
  if (o.baseline_f1) {
    report.baseline_name = o.baseline_name;
    report.error_reduction = error_reduction(*o.baseline_f1, report.f1);
  }
  write_report(out, report);
  if (!o.buckets_out.empty()) {
    auto tsv = open_output(o.buckets_out);
    write_buckets_tsv(tsv, length_bucket_f1(gold, predicted, o.bucket_width));
  }
}

void run_bpe_learn(const BpeLearnOptions& o, std::ostream& out, std::ostream& err) {
  require_file(o.corpus, "--corpus");
  if (o.out.empty()) throw UsageError("--out is required");
  std::vector<std::u32string> lines;
  for (auto line : read_raw_lines(o.corpus)) {
    std::erase_if(line, [](char32_t c) { return c == U' ' || c == U'\t' || c == U'　'; });
    if (!line.empty()) lines.push_back(std::move(line));
  }
  if (lines.empty()) throw DataError("BPE corpus '" + o.corpus + "' has no text");
  const auto model = learn_bpe(lines, o.merges);
  const auto lexicon = extract_lexicon(model);
  const auto lexicon_path = o.lexicon_out.empty() ? o.out + ".lexicon" : o.lexicon_out;
  save_bpe_model(model, o.out);
  save_lexicon(lexicon, lexicon_path);
  out << "merges=" << model.merge_count() << '\n' << "lexicon_entries=" << lexicon.size() << '\n';
  if (model.merge_count() < o.merges) err << "note: stopped early, no pair occurs twice\n";
}

void run_coverage(const CoverageOptions& o, std::ostream& out, std::ostream& err) {
  require_file(o.gold, "--gold");
  require_file(o.lexicon, "--lexicon");
  const auto gold = read_segmented_file(o.gold);
  const auto lexicon = read_lexicon_file(o.lexicon);
  write_coverage(out, coverage_report(gold, lexicon));
  (void)err;
}

}  // namespace latticecws::cli
