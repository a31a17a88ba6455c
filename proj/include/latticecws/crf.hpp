#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "latticecws/corpus.hpp"
#include "latticecws/tape.hpp"
#include "latticecws/tensor.hpp"

namespace latticecws {

// Transition indices beyond the four BMES tags.
inline constexpr std::size_t kStart = 4;
inline constexpr std::size_t kStop = 5;
inline constexpr std::size_t kNumStates = 6;

// Emission projection F(l) = W_l h + b_l and the 6x6 transition matrix
// (row = previous state). Transitions into START and out of STOP are -inf.
struct CrfParams {
  Tensor emission_w;   // [4, input]
  Tensor emission_b;   // [4]
  Tensor transitions;  // [6, 6]

  static CrfParams create(std::size_t input_dim, Rng& rng);
  ParamList parameters();
};

// Sets the masked transition entries to -inf and leaves the rest untouched.
void mask_transitions(Tensor& transitions);

using Emissions = std::vector<std::array<Real, kNumTags>>;

std::vector<Var> emission_scores(std::span<const Var> hidden, CrfParams& params);
Emissions values_of(std::span<const Var> emissions);

struct LabelPath {
  std::vector<Tag> labels;
  Real score = 0.0;
};

// Σ F(l_i) + Σ L(l_{i-1}, l_i) with l_0 = START and a final L(l_m, STOP).
Real score_path(const Emissions& emissions, std::span<const Tag> labels, const Tensor& transitions);
// log Σ_paths exp(score), forward algorithm in log space.
Real log_partition(const Emissions& emissions, const Tensor& transitions);
// Highest-scoring path; ties go to the smallest label index.
LabelPath viterbi(const Emissions& emissions, const Tensor& transitions);

// -(score(gold) - log Z). Backward yields marginals minus gold indicators for
// the emissions and expected minus gold transition counts.
Var nll_loss(std::span<const Var> emissions, std::span<const Tag> gold, Tensor& transitions);

}  // namespace latticecws
