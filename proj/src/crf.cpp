#include "latticecws/crf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "latticecws/errors.hpp"
#include "latticecws/ops.hpp"

namespace latticecws {

namespace {

constexpr Real kNegInf = -std::numeric_limits<Real>::infinity();

Real logsumexp(std::span<const Real> v) {
  Real mx = kNegInf;
  for (auto x : v) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  Real s = 0.0;
  for (auto x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

std::size_t idx(Tag t) { return static_cast<std::size_t>(t); }

void check_transitions(const Tensor& t) {
  if (t.shape() != std::vector<std::size_t>{kNumStates, kNumStates}) {
    throw DimensionError("CRF transitions '" + t.name() + "' must be 6x6");
  }
}

struct Lattice {
  std::vector<std::array<Real, kNumTags>> alpha;
  std::vector<std::array<Real, kNumTags>> beta;
  Real log_z = 0.0;
};

Lattice forward_backward(const Emissions& e, const Tensor& T) {
  const auto m = e.size();
  Lattice L;
  L.alpha.resize(m);
  L.beta.resize(m);
  std::array<Real, kNumTags> buf{};
  for (std::size_t l = 0; l < kNumTags; ++l) L.alpha[0][l] = T.at(kStart, l) + e[0][l];
  for (std::size_t i = 1; i < m; ++i) {
    for (std::size_t l = 0; l < kNumTags; ++l) {
      for (std::size_t k = 0; k < kNumTags; ++k) buf[k] = L.alpha[i - 1][k] + T.at(k, l);
      L.alpha[i][l] = e[i][l] + logsumexp(buf);
    }
  }
  for (std::size_t l = 0; l < kNumTags; ++l) {
    L.beta[m - 1][l] = T.at(l, kStop);
    buf[l] = L.alpha[m - 1][l] + L.beta[m - 1][l];
  }
  L.log_z = logsumexp(buf);
  for (std::size_t i = m - 1; i-- > 0;) {
    for (std::size_t l = 0; l < kNumTags; ++l) {
      for (std::size_t k = 0; k < kNumTags; ++k) buf[k] = T.at(l, k) + e[i + 1][k] + L.beta[i + 1][k];
      L.beta[i][l] = logsumexp(buf);
    }
  }
  return L;
}

}  // namespace

void mask_transitions(Tensor& transitions) {
  check_transitions(transitions);
  for (std::size_t s = 0; s < kNumStates; ++s) {
    transitions.at(s, kStart) = kNegInf;
    transitions.at(kStop, s) = kNegInf;
  }
}

CrfParams CrfParams::create(std::size_t input_dim, Rng& rng) {
  CrfParams p{Tensor("crf.emission_w", {kNumTags, input_dim}), Tensor("crf.emission_b", {kNumTags}),
              Tensor("crf.transitions", {kNumStates, kNumStates})};
  const auto bound = uniform_bound(input_dim);
  p.emission_w.fill_uniform(bound, rng);
  p.emission_b.fill_uniform(bound, rng);
  p.transitions.fill_uniform(uniform_bound(kNumStates), rng);
  mask_transitions(p.transitions);
  return p;
}

ParamList CrfParams::parameters() { return {&emission_w, &emission_b, &transitions}; }

std::vector<Var> emission_scores(std::span<const Var> hidden, CrfParams& params) {
  std::vector<Var> out;
  out.reserve(hidden.size());
  for (const auto& h : hidden) out.push_back(affine(h, params.emission_w, params.emission_b));
  return out;
}

Emissions values_of(std::span<const Var> emissions) {
  Emissions out(emissions.size());
  for (std::size_t i = 0; i < emissions.size(); ++i) {
    if (emissions[i].size() != kNumTags) throw DimensionError("emission vector must have 4 entries");
    std::copy(emissions[i].value().begin(), emissions[i].value().end(), out[i].begin());
  }
  return out;
}

Real score_path(const Emissions& emissions, std::span<const Tag> labels, const Tensor& transitions) {
  check_transitions(transitions);
  if (emissions.size() != labels.size()) throw DimensionError("score_path: label count differs from sentence length");
  if (labels.empty()) return 0.0;
  Real s = 0.0;
  std::size_t prev = kStart;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    s += emissions[i][idx(labels[i])] + transitions.at(prev, idx(labels[i]));
    prev = idx(labels[i]);
  }
  return s + transitions.at(prev, kStop);
}

Real log_partition(const Emissions& emissions, const Tensor& transitions) {
  check_transitions(transitions);
  if (emissions.empty()) throw DimensionError("log_partition of an empty sentence");
  return forward_backward(emissions, transitions).log_z;
}

LabelPath viterbi(const Emissions& emissions, const Tensor& T) {
  check_transitions(T);
  const auto m = emissions.size();
  if (m == 0) throw DimensionError("viterbi of an empty sentence");
  std::vector<std::array<Real, kNumTags>> delta(m);
  std::vector<std::array<std::uint8_t, kNumTags>> back(m);
  for (std::size_t l = 0; l < kNumTags; ++l) delta[0][l] = T.at(kStart, l) + emissions[0][l];
  for (std::size_t i = 1; i < m; ++i) {
    for (std::size_t l = 0; l < kNumTags; ++l) {
      std::size_t best = 0;
      Real best_score = delta[i - 1][0] + T.at(0, l);
      for (std::size_t k = 1; k < kNumTags; ++k) {
        const Real s = delta[i - 1][k] + T.at(k, l);
        if (s > best_score) {
          best_score = s;
          best = k;
        }
      }
      delta[i][l] = best_score + emissions[i][l];
      back[i][l] = static_cast<std::uint8_t>(best);
    }
  }
  std::size_t last = 0;
  Real last_score = delta[m - 1][0] + T.at(0, kStop);
  for (std::size_t l = 1; l < kNumTags; ++l) {
    const Real s = delta[m - 1][l] + T.at(l, kStop);
    if (s > last_score) {
      last_score = s;
      last = l;
    }
  }
  LabelPath path;
  path.labels.resize(m);
  for (std::size_t i = m; i-- > 0;) {
    path.labels[i] = static_cast<Tag>(last);
    if (i > 0) last = back[i][last];
  }
  path.score = score_path(emissions, path.labels, T);
  return path;
}

Var nll_loss(std::span<const Var> emissions, std::span<const Tag> gold, Tensor& transitions) {
  check_transitions(transitions);
  if (emissions.empty()) throw DimensionError("nll_loss of an empty sentence");
  if (emissions.size() != gold.size()) throw DimensionError("nll_loss: gold length differs from sentence length");
  auto& tape = *emissions.front().tape();
  auto e = values_of(emissions);
  auto lattice = forward_backward(e, transitions);
  const Real loss = lattice.log_z - score_path(e, gold, transitions);

  std::vector<detail::Node*> inputs;
  for (const auto& v : emissions) inputs.push_back(&Tape::node(v));
  std::vector<Tag> labels(gold.begin(), gold.end());
  return tape.push({loss}, [inputs = std::move(inputs), labels = std::move(labels), e = std::move(e),
                            lattice = std::move(lattice), &transitions](detail::Node& self) {
    const Real g = self.grad[0];
    const auto m = e.size();
    const auto& T = transitions;
    auto tg = transitions.grad();
    auto tgrad = [&](std::size_t a, std::size_t b) -> Real& { return tg[a * kNumStates + b]; };
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t l = 0; l < kNumTags; ++l) {
        const Real marginal = std::exp(lattice.alpha[i][l] + lattice.beta[i][l] - lattice.log_z);
        inputs[i]->grad[l] += g * marginal;
      }
      inputs[i]->grad[idx(labels[i])] -= g;
    }
    for (std::size_t l = 0; l < kNumTags; ++l) {
      tgrad(kStart, l) += g * std::exp(lattice.alpha[0][l] + lattice.beta[0][l] - lattice.log_z);
      tgrad(l, kStop) += g * std::exp(lattice.alpha[m - 1][l] + lattice.beta[m - 1][l] - lattice.log_z);
    }
    for (std::size_t i = 1; i < m; ++i) {
      for (std::size_t a = 0; a < kNumTags; ++a) {
        for (std::size_t b = 0; b < kNumTags; ++b) {
          const Real p = std::exp(lattice.alpha[i - 1][a] + T.at(a, b) + e[i][b] + lattice.beta[i][b] - lattice.log_z);
          tgrad(a, b) += g * p;
        }
      }
    }
    std::size_t prev = kStart;
    for (auto t : labels) {
      tgrad(prev, idx(t)) -= g;
      prev = idx(t);
    }
    tgrad(prev, kStop) -= g;
  });
}

}  // namespace latticecws
