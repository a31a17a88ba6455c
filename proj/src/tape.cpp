#include "latticecws/tape.hpp"

#include <algorithm>

#include "latticecws/errors.hpp"

namespace latticecws {

Real Var::scalar() const {
  if (!valid() || size() != 1) throw DimensionError("scalar() requires a one-element value");
  return node_->value.front();
}

Var Tape::push(std::vector<Real> value, std::function<void(detail::Node&)> backward) {
  auto& n = nodes_.emplace_back();
  if (recording_) {
    n.grad.assign(value.size(), 0.0);
    n.backward = std::move(backward);
  }
  n.value = std::move(value);
  return Var(this, &n);
}

Var Tape::input(std::vector<Real> values) { return push(std::move(values), nullptr); }

Var Tape::lookup(Tensor& table, std::size_t r) {
  auto row = table.row(r);
  std::vector<Real> value(row.begin(), row.end());
  return push(std::move(value), [&table, r](detail::Node& n) {
    auto g = table.grad_row(r);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    table.mark_row(r);
  });
}

Var Tape::parameter(Tensor& t) {
  auto d = t.data();
  std::vector<Real> value(d.begin(), d.end());
  return push(std::move(value), [&t](detail::Node& n) {
    auto g = t.grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
  });
}

void Tape::backward(Var loss) {
  if (!recording_) throw UsageError("backward() called on a tape that is not recording");
  if (loss.tape() != this) throw UsageError("backward() loss belongs to a different tape");
  if (loss.size() != 1) throw DimensionError("backward() requires a scalar loss");
  if (swept_) {
    for (auto& n : nodes_) std::fill(n.grad.begin(), n.grad.end(), 0.0);
  }
  swept_ = true;
  node(loss).grad[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (!it->backward) continue;
    const bool any = std::any_of(it->grad.begin(), it->grad.end(), [](Real g) { return g != 0.0; });
    if (any) it->backward(*it);
  }
}

void backward(Var loss) {
  if (!loss.valid() || loss.tape() == nullptr) throw UsageError("backward() called with no active tape");
  loss.tape()->backward(loss);
}

}  // namespace latticecws
