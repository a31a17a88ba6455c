#include "latticecws/encoder.hpp"

#include <stdexcept>
#include <string>

#include "latticecws/errors.hpp"

namespace latticecws {

namespace {

Tensor uniform_tensor(std::string name, std::vector<std::size_t> shape, Real bound, Rng& rng) {
  Tensor t(std::move(name), std::move(shape));
  t.fill_uniform(bound, rng);
  return t;
}

DirectionParams make_direction(const std::string& prefix, std::size_t dx, std::size_t dw, std::size_t h,
                               Rng& rng) {
  DirectionParams p;
  const auto lstm_bound = uniform_bound(dx + h);
  p.lstm_w = uniform_tensor(prefix + ".lstm_w", {3 * h, dx + h}, lstm_bound, rng);
  p.lstm_b = uniform_tensor(prefix + ".lstm_b", {3 * h}, lstm_bound, rng);
  if (dw > 0) {
    const auto cell_bound = uniform_bound(dw + h);
    p.shortcut_w = uniform_tensor(prefix + ".shortcut_w", {3 * h, dw + h}, cell_bound, rng);
    p.shortcut_b = uniform_tensor(prefix + ".shortcut_b", {3 * h}, cell_bound, rng);
    const auto gate_bound = uniform_bound(dx + h);
    p.gate_w = uniform_tensor(prefix + ".gate_w", {h, dx + h}, gate_bound, rng);
    p.gate_b = uniform_tensor(prefix + ".gate_b", {h}, gate_bound, rng);
  }
  return p;
}

void append_direction(ParamList& out, DirectionParams& p) {
  out.push_back(&p.lstm_w);
  out.push_back(&p.lstm_b);
  if (p.has_lattice()) {
    out.push_back(&p.shortcut_w);
    out.push_back(&p.shortcut_b);
    out.push_back(&p.gate_w);
    out.push_back(&p.gate_b);
  }
}

}  // namespace

EncoderParams EncoderParams::create(std::size_t input_dim, std::size_t lexicon_dim, std::size_t hidden, Rng& rng) {
  if (input_dim == 0 || hidden == 0) throw ConfigError("encoder sizes must be positive");
  EncoderParams p;
  p.input_dim = input_dim;
  p.lexicon_dim = lexicon_dim;
  p.hidden = hidden;
  p.forward = make_direction("encoder.forward", input_dim, lexicon_dim, hidden, rng);
  p.backward = make_direction("encoder.backward", input_dim, lexicon_dim, hidden, rng);
  return p;
}

ParamList EncoderParams::parameters() {
  ParamList out;
  append_direction(out, forward);
  append_direction(out, backward);
  return out;
}

std::vector<Var> char_repr(Tape& tape, const std::u32string& chars, CharTables tables, Real dropout,
                           Mode mode, Rng& rng) {
  std::vector<Var> xs;
  xs.reserve(chars.size());
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const auto u = tables.unigrams->vocab.index(unigram_key(chars, i));
    const auto b = tables.bigrams->vocab.index(bigram_key(chars, i));
    Var x = concat({tape.lookup(tables.unigrams->vectors, u), tape.lookup(tables.bigrams->vectors, b)});
    if (mode == Mode::train && dropout > 0.0) x = scale(x, dropout_mask(x.size(), dropout, mode, rng));
    xs.push_back(x);
  }
  return xs;
}

LstmStep lstm_step(Var x, Var h_prev, Var c_prev, DirectionParams& p) {
  const auto h = h_prev.size();
  Var gates = affine(concat({x, h_prev}), p.lstm_w, p.lstm_b);
  LstmStep s;
  s.output_gate = sigmoid(slice(gates, 0, h));
  s.forget_gate = sigmoid(slice(gates, h, h));
  s.candidate = tanh(slice(gates, 2 * h, h));
  s.input_gate = one_minus(s.forget_gate);
  s.c = add(mul(s.forget_gate, c_prev), mul(s.input_gate, s.candidate));
  s.h = mul(s.output_gate, tanh(s.c));
  return s;
}

Var shortcut_cell(Var word, Var h_b, Var c_b, DirectionParams& p) {
  if (!p.has_lattice()) throw UsageError("shortcut_cell requires lattice parameters");
  const auto h = h_b.size();
  Var gates = affine(concat({word, h_b}), p.shortcut_w, p.shortcut_b);
  Var input = sigmoid(slice(gates, 0, h));
  Var forget = sigmoid(slice(gates, h, h));
  Var candidate = tanh(slice(gates, 2 * h, h));
  return add(mul(forget, c_b), mul(input, candidate));
}

Var gate_logit(Var x, Var shortcut_memory, DirectionParams& p) {
  if (!p.has_lattice()) throw UsageError("gate_logit requires lattice parameters");
  return sigmoid(affine(concat({x, shortcut_memory}), p.gate_w, p.gate_b));
}

GateWeights gate_normalize(Var char_gate, std::span<const Var> match_gates) {
  std::vector<Var> all;
  all.reserve(match_gates.size() + 1);
  all.push_back(char_gate);
  all.insert(all.end(), match_gates.begin(), match_gates.end());
  auto w = normalize_across(all);
  GateWeights out;
  out.character = w.front();
  out.matches.assign(w.begin() + 1, w.end());
  return out;
}

DirectionTrace lattice_forward(std::span<const Var> xs, std::span<const std::vector<Incoming>> incoming,
                               DirectionParams& p, std::size_t hidden) {
  if (incoming.size() != xs.size()) throw std::logic_error("lattice_forward: shortcut index size mismatch");
  DirectionTrace t;
  const auto m = xs.size();
  t.h.reserve(m);
  t.c.reserve(m);
  t.weights.resize(m);
  if (m == 0) return t;
  auto& tape = *xs.front().tape();
  const Var zeros = tape.input(std::vector<Real>(hidden, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    const Var h_prev = i == 0 ? zeros : t.h[i - 1];
    const Var c_prev = i == 0 ? zeros : t.c[i - 1];
    if (incoming[i].empty()) {
      auto s = lstm_step(xs[i], h_prev, c_prev, p);
      t.h.push_back(s.h);
      t.c.push_back(s.c);
      t.forget_gate.push_back(s.forget_gate);
      t.input_gate.push_back(s.input_gate);
      continue;
    }
    Var gates = affine(concat({xs[i], h_prev}), p.lstm_w, p.lstm_b);
    Var output = sigmoid(slice(gates, 0, hidden));
    Var forget = sigmoid(slice(gates, hidden, hidden));
    Var candidate = tanh(slice(gates, 2 * hidden, hidden));
    Var input = one_minus(forget);

    std::vector<Var> memories;
    std::vector<Var> match_gates;
    for (const auto& in : incoming[i]) {
      if (in.from >= i) {
        throw std::logic_error("lattice_forward: shortcut from " + std::to_string(in.from) + " into " +
                               std::to_string(i) + " does not point forward");
      }
      memories.push_back(shortcut_cell(in.word, t.h[in.from], t.c[in.from], p));
      match_gates.push_back(gate_logit(xs[i], memories.back(), p));
    }
    auto w = gate_normalize(input, match_gates);
    Var c = mul(w.character, candidate);
    for (std::size_t k = 0; k < memories.size(); ++k) c = add(c, mul(w.matches[k], memories[k]));
    t.h.push_back(mul(output, tanh(c)));
    t.c.push_back(c);
    t.forget_gate.push_back(forget);
    t.input_gate.push_back(input);
    t.weights[i].push_back(w.character);
    t.weights[i].insert(t.weights[i].end(), w.matches.begin(), w.matches.end());
  }
  return t;
}

Encoding encode_bidirectional(std::span<const Var> xs, const LatticeMatchSet& matches,
                              std::span<const Var> words, EncoderParams& params) {
  const auto m = xs.size();
  if (words.size() != matches.matches.size()) {
    throw std::logic_error("encode_bidirectional: one lexicon input per match required");
  }
  std::vector<std::vector<Incoming>> fwd(m);
  std::vector<std::vector<Incoming>> bwd(m);
  for (std::size_t k = 0; k < matches.matches.size(); ++k) {
    const auto& mt = matches.matches[k];
    if (mt.end >= m || mt.begin >= mt.end) {
      throw std::logic_error("encode_bidirectional: match (" + std::to_string(mt.begin) + ", " +
                             std::to_string(mt.end) + ") out of range");
    }
    fwd[mt.end].push_back({mt.begin, words[k]});
  }
  // Reversed order: position m-1-b is visited after m-1-e.
  for (std::size_t k = 0; k < matches.matches.size(); ++k) {
    const auto& mt = matches.matches[k];
    bwd[m - 1 - mt.begin].push_back({m - 1 - mt.end, words[k]});
  }
  std::vector<Var> reversed(xs.rbegin(), xs.rend());
  Encoding enc;
  enc.forward = lattice_forward(xs, fwd, params.forward, params.hidden);
  enc.backward = lattice_forward(reversed, bwd, params.backward, params.hidden);
  enc.hidden.reserve(m);
  for (std::size_t i = 0; i < m; ++i) enc.hidden.push_back(concat({enc.forward.h[i], enc.backward.h[m - 1 - i]}));
  return enc;
}

}  // namespace latticecws
