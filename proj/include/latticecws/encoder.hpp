#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "latticecws/lexicon.hpp"
#include "latticecws/ops.hpp"
#include "latticecws/tape.hpp"
#include "latticecws/tensor.hpp"
#include "latticecws/vocab.hpp"

namespace latticecws {

// Parameters of one encoder direction.
//
// The character LSTM affine stacks [o; f; c~] over [x; h_prev]. The shortcut
// cell stacks [i; f; c~] over [e_w; h_b] and has no output gate. The
// subsequence gate maps [x; c_b] to H sigmoid units. Shortcut and gate
// tensors are empty in baseline models.
struct DirectionParams {
  Tensor lstm_w;
  Tensor lstm_b;
  Tensor shortcut_w;
  Tensor shortcut_b;
  Tensor gate_w;
  Tensor gate_b;

  bool has_lattice() const noexcept { return shortcut_w.size() != 0; }
};

struct EncoderParams {
  std::size_t input_dim = 0;
  std::size_t lexicon_dim = 0;  // 0 for the baseline encoder
  std::size_t hidden = 0;
  DirectionParams forward;
  DirectionParams backward;

  // Weights and biases uniform in [-sqrt(3/fan_in), sqrt(3/fan_in)].
  static EncoderParams create(std::size_t input_dim, std::size_t lexicon_dim, std::size_t hidden, Rng& rng);
  ParamList parameters();
};

struct CharTables {
  EmbeddingTable* unigrams;
  EmbeddingTable* bigrams;
};

// x_i = e(c_i) ++ e(c_i c_{i+1}), times a char-dropout mask in train mode.
std::vector<Var> char_repr(Tape& tape, const std::u32string& chars, CharTables tables, Real dropout,
                           Mode mode, Rng& rng);

struct LstmStep {
  Var h;
  Var c;
  Var output_gate;
  Var forget_gate;
  Var input_gate;  // 1 - forget_gate
  Var candidate;
};

// Coupled-gate LSTM step.
LstmStep lstm_step(Var x, Var h_prev, Var c_prev, DirectionParams& p);

// Memory of the shortcut path from a start character: f*c_b + i*c~.
Var shortcut_cell(Var word, Var h_b, Var c_b, DirectionParams& p);

// sigmoid(W_g [x; c_b] + b_g)
Var gate_logit(Var x, Var shortcut_memory, DirectionParams& p);

struct GateWeights {
  Var character;
  std::vector<Var> matches;
};

// Elementwise softmax over the character input gate and the subsequence gates.
GateWeights gate_normalize(Var char_gate, std::span<const Var> match_gates);

// A shortcut arriving at a position, in processing order.
struct Incoming {
  std::size_t from;
  Var word;
};

struct DirectionTrace {
  std::vector<Var> h;
  std::vector<Var> c;
  std::vector<Var> forget_gate;
  std::vector<Var> input_gate;
  // Per position: [character weight, one weight per incoming shortcut];
  // empty where no shortcut arrives (plain LSTM step).
  std::vector<std::vector<Var>> weights;
};

// Runs one direction over `xs` in the given order. Positions without incoming
// shortcuts take the plain coupled-LSTM update; the rest fuse the candidate
// memory with every shortcut memory through normalized gates.
// Throws std::logic_error if a shortcut does not start strictly before its end.
DirectionTrace lattice_forward(std::span<const Var> xs, std::span<const std::vector<Incoming>> incoming,
                               DirectionParams& p, std::size_t hidden);

struct Encoding {
  std::vector<Var> hidden;  // forward ++ backward, original order
  DirectionTrace forward;
  DirectionTrace backward;  // reversed order
};

// `words[k]` is the lexicon embedding input of `matches.matches[k]`. The
// backward direction reads the sentence reversed with every match (b, e)
// turned into a shortcut from e into b.
Encoding encode_bidirectional(std::span<const Var> xs, const LatticeMatchSet& matches,
                              std::span<const Var> words, EncoderParams& params);

}  // namespace latticecws
