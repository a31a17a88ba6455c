#include "latticecws/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include "latticecws/errors.hpp"

namespace latticecws {

void TrainConfig::validate() const {
  auto rate = [](Real r, const char* what) {
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError(std::string(what) + " must lie in [0, 1)");
  };
  rate(lr0, "learning rate");
  rate(lr_decay, "learning rate decay");
  rate(model.char_dropout, "char dropout");
  rate(model.lattice_dropout, "lattice dropout");
  if (!(lr0 > 0.0)) throw ConfigError("learning rate must be positive");
  if (model.hidden == 0 || model.unigram_dim == 0 || model.bigram_dim == 0 || model.lexicon_dim == 0) {
    throw ConfigError("layer sizes must be positive");
  }
  if (epochs == 0) throw ConfigError("epochs must be positive");
}

Real learning_rate(const TrainConfig& config, std::size_t epoch) {
  return config.lr0 / (1.0 + config.lr_decay * static_cast<Real>(epoch));
}

std::vector<std::vector<Tag>> decode_all(Model& model, std::span<const LabeledSentence> sentences) {
  std::vector<std::vector<Tag>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(model.decode(s.chars).labels);
  return out;
}

TrainResult train(const TrainConfig& config, Model& model, std::span<const LabeledSentence> train_set,
                  std::span<const LabeledSentence> dev_set, Rng& rng, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw DataError("training set is empty");
  if (dev_set.empty()) throw DataError("development set is empty");

  std::vector<LatticeMatchSet> matches;
  matches.reserve(train_set.size());
  for (const auto& s : train_set) matches.push_back(model.matches(s.chars));
  const auto vocabulary = training_words(train_set);
  auto params = model.parameters();

  TrainResult result;
  std::vector<std::vector<Real>> best_params;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    EpochRecord rec;
    rec.epoch = epoch;
    rec.learning_rate = learning_rate(config, epoch);
    std::shuffle(order.begin(), order.end(), rng);
    for (auto id : order) {
      Tape tape;
      Var loss = model.loss(tape, train_set[id], matches[id], Mode::train, rng);
      if (!std::isfinite(loss.scalar())) {
        throw NumericError("non-finite loss on training sentence " + std::to_string(id + 1));
      }
      rec.train_loss += loss.scalar();
      backward(loss);
      sgd_step(params, rec.learning_rate);
    }
    rec.dev = evaluate_f1(dev_set, decode_all(model, dev_set), vocabulary);
    rec.dev.epoch = epoch;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (result.epochs.empty() || rec.dev.f1 > result.best.f1) {
      result.best = rec.dev;
      result.best_epoch = epoch;
      best_params = model.snapshot();
    }
    result.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  model.restore(best_params);
  return result;
}

void write_epochs_tsv(std::ostream& out, std::span<const EpochRecord> epochs) {
  out << "epoch\tlr\ttrain_loss\tdev_p\tdev_r\tdev_f1\tdev_r_iv\tdev_r_oov\tseconds\n";
  for (const auto& e : epochs) {
    out << e.epoch << '\t' << e.learning_rate << '\t' << e.train_loss << '\t' << e.dev.precision << '\t'
        << e.dev.recall << '\t' << e.dev.f1 << '\t' << e.dev.r_iv << '\t' << e.dev.r_oov << '\t' << e.seconds
        << '\n';
  }
}

namespace {

Real parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const Real v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' expects a number, got '" + value + "'");
  }
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(value, &used);
    if (used != value.size() || value.front() == '-') throw std::invalid_argument(value);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' expects a non-negative integer, got '" + value + "'");
  }
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_value(TrainConfig& config, const std::string& key, const std::string& value) {
  if (key == "lr") config.lr0 = parse_real(key, value);
  else if (key == "lr_decay") config.lr_decay = parse_real(key, value);
  else if (key == "char_dropout") config.model.char_dropout = parse_real(key, value);
  else if (key == "lattice_dropout") config.model.lattice_dropout = parse_real(key, value);
  else if (key == "hidden") config.model.hidden = parse_size(key, value);
  else if (key == "char_emb") config.model.unigram_dim = parse_size(key, value);
  else if (key == "bigram_emb") config.model.bigram_dim = parse_size(key, value);
  else if (key == "lexicon_emb") config.model.lexicon_dim = parse_size(key, value);
  else if (key == "max_match_length") config.model.max_match_length = parse_size(key, value);
  else if (key == "epochs") config.epochs = parse_size(key, value);
  else if (key == "seed") config.seed = parse_size(key, value);
  else if (key == "mode") config.model.mode = parse_mode(value);
  else throw ConfigError("unknown config key '" + key + "'");
}

void apply_config_file(TrainConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trimmed(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ": line " + std::to_string(line_no) + " is not key=value");
    }
    apply_config_value(config, trimmed(line.substr(0, eq)), trimmed(line.substr(eq + 1)));
  }
}

}  // namespace latticecws
