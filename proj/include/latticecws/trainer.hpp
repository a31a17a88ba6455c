#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "latticecws/metrics.hpp"
#include "latticecws/model.hpp"

namespace latticecws {

enum class EmbeddingSource { pretrained, random };

struct TrainConfig {
  ModelConfig model;
  Real lr0 = 0.01;
  Real lr_decay = 0.05;
  std::size_t epochs = 30;
  std::uint64_t seed = 1;
  EmbeddingSource embeddings = EmbeddingSource::random;

  // Throws ConfigError unless rates lie in [0, 1) and sizes are positive.
  void validate() const;
};

// lr0 / (1 + lr_decay * epoch), epoch counted from 0.
Real learning_rate(const TrainConfig& config, std::size_t epoch);

struct EpochRecord {
  std::size_t epoch = 0;
  Real learning_rate = 0.0;
  Real train_loss = 0.0;  // summed over sentences
  EvalReport dev;
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  EvalReport best;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Per-sentence SGD with the decayed learning rate and a seeded shuffle each
// epoch. The model ends holding the parameters of the epoch with the best
// dev F1 (earliest on ties). Throws NumericError on a non-finite loss.
TrainResult train(const TrainConfig& config, Model& model, std::span<const LabeledSentence> train_set,
                  std::span<const LabeledSentence> dev_set, Rng& rng, const EpochCallback& on_epoch = {});

std::vector<std::vector<Tag>> decode_all(Model& model, std::span<const LabeledSentence> sentences);

void write_epochs_tsv(std::ostream& out, std::span<const EpochRecord> epochs);

// key=value lines; '#' starts a comment. Unknown keys raise ConfigError.
void apply_config_file(TrainConfig& config, const std::string& path);
void apply_config_value(TrainConfig& config, const std::string& key, const std::string& value);

}  // namespace latticecws
