#include "latticecws/ops.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "latticecws/errors.hpp"

namespace latticecws {

namespace {

using VecMap = Eigen::Map<Eigen::Matrix<Real, Eigen::Dynamic, 1>>;
using ConstVecMap = Eigen::Map<const Eigen::Matrix<Real, Eigen::Dynamic, 1>>;
using MatMap = Eigen::Map<Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstMatMap = Eigen::Map<const Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

Tape& tape_of(Var a) {
  if (!a.valid()) throw UsageError("operation on an empty Var");
  return *a.tape();
}

Tape& common_tape(Var a, Var b) {
  auto& t = tape_of(a);
  if (b.tape() != &t) throw UsageError("operands recorded on different tapes");
  return t;
}

void require_same_size(Var a, Var b, const char* op) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(op) + ": operand sizes differ (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
  }
}

}  // namespace

Var affine(Var x, Tensor& W, Tensor& b) {
  auto& tape = tape_of(x);
  if (W.shape().size() != 2) throw DimensionError("affine: W '" + W.name() + "' must be a matrix");
  const auto m = W.shape()[0];
  const auto n = W.shape()[1];
  if (x.size() != n || b.size() != m) {
    throw DimensionError("affine: W '" + W.name() + "' [" + std::to_string(m) + "x" + std::to_string(n) +
                         "], b '" + b.name() + "' [" + std::to_string(b.size()) + "], x [" +
                         std::to_string(x.size()) + "] do not conform");
  }
  std::vector<Real> out(m);
  VecMap(out.data(), m) = ConstMatMap(W.data().data(), m, n) * ConstVecMap(x.value().data(), n) +
                          ConstVecMap(b.data().data(), m);
  auto& xn = Tape::node(x);
  return tape.push(std::move(out), [&xn, &W, &b, m, n](detail::Node& self) {
    ConstVecMap g(self.grad.data(), m);
    MatMap(W.grad().data(), m, n).noalias() += g * ConstVecMap(xn.value.data(), n).transpose();
    VecMap(b.grad().data(), m) += g;
    VecMap(xn.grad.data(), n).noalias() += ConstMatMap(W.data().data(), m, n).transpose() * g;
  });
}

Var activate(Var x, Activation kind) {
  auto& tape = tape_of(x);
  auto& xn = Tape::node(x);
  const auto n = x.size();
  std::vector<Real> out(n);
  switch (kind) {
    case Activation::sigmoid:
      for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / (1.0 + std::exp(-xn.value[i]));
      return tape.push(std::move(out), [&xn](detail::Node& self) {
        for (std::size_t i = 0; i < self.value.size(); ++i) {
          const Real s = self.value[i];
          xn.grad[i] += self.grad[i] * s * (1.0 - s);
        }
      });
    case Activation::tanh:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(xn.value[i]);
      return tape.push(std::move(out), [&xn](detail::Node& self) {
        for (std::size_t i = 0; i < self.value.size(); ++i) {
          const Real t = self.value[i];
          xn.grad[i] += self.grad[i] * (1.0 - t * t);
        }
      });
    case Activation::softmax: {
      if (n == 0) throw DimensionError("softmax of an empty vector");
      const Real mx = *std::max_element(xn.value.begin(), xn.value.end());
      Real z = 0.0;
      for (std::size_t i = 0; i < n; ++i) z += out[i] = std::exp(xn.value[i] - mx);
      for (auto& v : out) v /= z;
      return tape.push(std::move(out), [&xn](detail::Node& self) {
        Real inner = 0.0;
        for (std::size_t i = 0; i < self.value.size(); ++i) inner += self.value[i] * self.grad[i];
        for (std::size_t i = 0; i < self.value.size(); ++i) {
          xn.grad[i] += self.value[i] * (self.grad[i] - inner);
        }
      });
    }
  }
  throw UsageError("unknown activation");
}

Var add(Var a, Var b) {
  auto& tape = common_tape(a, b);
  require_same_size(a, b, "add");
  auto& an = Tape::node(a);
  auto& bn = Tape::node(b);
  std::vector<Real> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = an.value[i] + bn.value[i];
  return tape.push(std::move(out), [&an, &bn](detail::Node& self) {
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      an.grad[i] += self.grad[i];
      bn.grad[i] += self.grad[i];
    }
  });
}

Var mul(Var a, Var b) {
  auto& tape = common_tape(a, b);
  require_same_size(a, b, "mul");
  auto& an = Tape::node(a);
  auto& bn = Tape::node(b);
  std::vector<Real> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = an.value[i] * bn.value[i];
  return tape.push(std::move(out), [&an, &bn](detail::Node& self) {
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      an.grad[i] += self.grad[i] * bn.value[i];
      bn.grad[i] += self.grad[i] * an.value[i];
    }
  });
}

Var one_minus(Var a) {
  auto& tape = tape_of(a);
  auto& an = Tape::node(a);
  std::vector<Real> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 - an.value[i];
  return tape.push(std::move(out), [&an](detail::Node& self) {
    for (std::size_t i = 0; i < self.grad.size(); ++i) an.grad[i] -= self.grad[i];
  });
}

Var scale(Var a, std::vector<Real> mask) {
  auto& tape = tape_of(a);
  if (mask.size() != a.size()) throw DimensionError("scale: mask size differs from operand");
  auto& an = Tape::node(a);
  std::vector<Real> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = an.value[i] * mask[i];
  return tape.push(std::move(out), [&an, mask = std::move(mask)](detail::Node& self) {
    for (std::size_t i = 0; i < self.grad.size(); ++i) an.grad[i] += self.grad[i] * mask[i];
  });
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("concat of no operands");
  auto& tape = tape_of(parts.front());
  std::vector<detail::Node*> nodes;
  std::vector<Real> out;
  for (const auto& p : parts) {
    if (p.tape() != &tape) throw UsageError("operands recorded on different tapes");
    nodes.push_back(&Tape::node(p));
    out.insert(out.end(), p.value().begin(), p.value().end());
  }
  return tape.push(std::move(out), [nodes = std::move(nodes)](detail::Node& self) {
    std::size_t offset = 0;
    for (auto* n : nodes) {
      for (std::size_t i = 0; i < n->grad.size(); ++i) n->grad[i] += self.grad[offset + i];
      offset += n->grad.size();
    }
  });
}

Var concat(std::initializer_list<Var> parts) {
  return concat(std::span<const Var>(parts.begin(), parts.size()));
}

Var slice(Var a, std::size_t offset, std::size_t length) {
  auto& tape = tape_of(a);
  if (offset + length > a.size()) throw DimensionError("slice: range exceeds operand size");
  auto& an = Tape::node(a);
  std::vector<Real> out(an.value.begin() + static_cast<std::ptrdiff_t>(offset),
                        an.value.begin() + static_cast<std::ptrdiff_t>(offset + length));
  return tape.push(std::move(out), [&an, offset](detail::Node& self) {
    for (std::size_t i = 0; i < self.grad.size(); ++i) an.grad[offset + i] += self.grad[i];
  });
}

Var sum(Var a) {
  auto& tape = tape_of(a);
  auto& an = Tape::node(a);
  Real s = 0.0;
  for (auto v : an.value) s += v;
  return tape.push({s}, [&an](detail::Node& self) {
    for (auto& g : an.grad) g += self.grad[0];
  });
}

Var dot(Var a, std::span<const Real> weights) {
  auto& tape = tape_of(a);
  if (weights.size() != a.size()) throw DimensionError("dot: weight size differs from operand");
  auto& an = Tape::node(a);
  Real s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) s += an.value[i] * weights[i];
  std::vector<Real> w(weights.begin(), weights.end());
  return tape.push({s}, [&an, w = std::move(w)](detail::Node& self) {
    for (std::size_t i = 0; i < w.size(); ++i) an.grad[i] += self.grad[0] * w[i];
  });
}

std::vector<Var> normalize_across(std::span<const Var> gates) {
  if (gates.empty()) throw DimensionError("normalize_across of no operands");
  auto& tape = tape_of(gates.front());
  const auto k = gates.size();
  const auto n = gates.front().size();
  std::vector<detail::Node*> in;
  for (const auto& g : gates) {
    if (g.tape() != &tape) throw UsageError("operands recorded on different tapes");
    if (g.size() != n) throw DimensionError("normalize_across: gate sizes differ");
    in.push_back(&Tape::node(g));
  }
  // Joint node of k*n weights; gate l occupies [l*n, (l+1)*n).
  std::vector<Real> joint(k * n);
  for (std::size_t j = 0; j < n; ++j) {
    Real mx = in[0]->value[j];
    for (std::size_t l = 1; l < k; ++l) mx = std::max(mx, in[l]->value[j]);
    Real z = 0.0;
    for (std::size_t l = 0; l < k; ++l) z += joint[l * n + j] = std::exp(in[l]->value[j] - mx);
    for (std::size_t l = 0; l < k; ++l) joint[l * n + j] /= z;
  }
  Var weights = tape.push(std::move(joint), [in, n](detail::Node& self) {
    const auto k = in.size();
    for (std::size_t j = 0; j < n; ++j) {
      Real inner = 0.0;
      for (std::size_t l = 0; l < k; ++l) inner += self.value[l * n + j] * self.grad[l * n + j];
      for (std::size_t l = 0; l < k; ++l) {
        in[l]->grad[j] += self.value[l * n + j] * (self.grad[l * n + j] - inner);
      }
    }
  });
  std::vector<Var> out;
  out.reserve(k);
  for (std::size_t l = 0; l < k; ++l) out.push_back(slice(weights, l * n, n));
  return out;
}

}  // namespace latticecws
