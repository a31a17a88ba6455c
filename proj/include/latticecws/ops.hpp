#pragma once

#include <span>
#include <vector>

#include "latticecws/tape.hpp"
#include "latticecws/tensor.hpp"

namespace latticecws {

enum class Activation { sigmoid, tanh, softmax };

// out = W x + b with W of shape [m, n].
Var affine(Var x, Tensor& W, Tensor& b);
Var activate(Var x, Activation kind);
inline Var sigmoid(Var x) { return activate(x, Activation::sigmoid); }
inline Var tanh(Var x) { return activate(x, Activation::tanh); }
inline Var softmax(Var x) { return activate(x, Activation::softmax); }

Var add(Var a, Var b);
Var mul(Var a, Var b);
// 1 - a, elementwise.
Var one_minus(Var a);
// a * mask with a constant mask (dropout).
Var scale(Var a, std::vector<Real> mask);
Var concat(std::span<const Var> parts);
Var concat(std::initializer_list<Var> parts);
Var slice(Var a, std::size_t offset, std::size_t length);
Var sum(Var a);
// Σ_k w_k a_k with constant weights.
Var dot(Var a, std::span<const Real> weights);

// Elementwise softmax across a set of equally sized vectors:
// out_k[j] = exp(in_k[j]) / Σ_l exp(in_l[j]).
std::vector<Var> normalize_across(std::span<const Var> gates);

}  // namespace latticecws
