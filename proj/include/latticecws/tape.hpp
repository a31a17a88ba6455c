#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "latticecws/tensor.hpp"

namespace latticecws {

class Tape;

namespace detail {

struct Node {
  std::vector<Real> value;
  std::vector<Real> grad;  // empty unless the owning tape records
  std::function<void(Node&)> backward;
};

}  // namespace detail

// Handle to a value produced on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  bool valid() const noexcept { return node_ != nullptr; }
  Tape* tape() const noexcept { return tape_; }
  std::size_t size() const noexcept { return node_->value.size(); }
  std::span<const Real> value() const noexcept { return node_->value; }
  Real scalar() const;
  // Gradient accumulated by the last backward pass; empty for non-recording tapes.
  std::span<const Real> grad() const noexcept { return node_->grad; }

 private:
  friend class Tape;
  Var(Tape* tape, detail::Node* node) : tape_(tape), node_(node) {}

  Tape* tape_ = nullptr;
  detail::Node* node_ = nullptr;
};

// Ordered record of executed primitives. A recording tape keeps gradient
// buffers and backward closures; a non-recording tape only evaluates.
//
// Nodes live in a deque so handles stay stable while the tape grows.
class Tape {
 public:
  explicit Tape(bool recording = true) : recording_(recording) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const noexcept { return recording_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  // Leaf holding fixed values. Its gradient is still collected when recording.
  Var input(std::vector<Real> values);
  // Row `r` of a parameter table; the gradient is scattered back into the table.
  Var lookup(Tensor& table, std::size_t r);
  // The whole tensor as a flat vector leaf.
  Var parameter(Tensor& t);

  // Appends a node; `backward` receives the finished node and must route its
  // gradient into operands. Ignored when not recording.
  Var push(std::vector<Real> value, std::function<void(detail::Node&)> backward);

  // Reverse sweep from a scalar loss. Every node is visited once.
  void backward(Var loss);

  static detail::Node& node(Var v) { return *v.node_; }

 private:
  bool recording_;
  bool swept_ = false;
  std::deque<detail::Node> nodes_;
};

// Runs Tape::backward on the loss's tape; UsageError if the loss has no tape.
void backward(Var loss);

}  // namespace latticecws
