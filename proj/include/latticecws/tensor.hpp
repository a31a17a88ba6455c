#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace latticecws {

using Real = double;
using Rng = std::mt19937_64;

// Dense row-major array with a same-shape gradient accumulator.
//
// Tensors with row tracking enabled (embedding tables) remember which rows
// received gradient since the last update so that the optimizer only visits
// those rows.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::string name, std::vector<std::size_t> shape, bool track_rows = false);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t rows() const noexcept { return shape_.empty() ? 0 : shape_.front(); }
  std::size_t cols() const noexcept { return rows() == 0 ? 0 : size() / rows(); }

  std::span<Real> data() noexcept { return data_; }
  std::span<const Real> data() const noexcept { return data_; }
  std::span<Real> grad() noexcept { return grad_; }
  std::span<const Real> grad() const noexcept { return grad_; }

  std::span<Real> row(std::size_t r);
  std::span<const Real> row(std::size_t r) const;
  std::span<Real> grad_row(std::size_t r);

  Real& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  Real at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  bool tracks_rows() const noexcept { return track_rows_; }
  void mark_row(std::size_t r);
  const std::vector<std::size_t>& touched_rows() const noexcept { return touched_; }

  void zero_grad();
  void fill(Real v);
  // Uniform in [-bound, bound].
  void fill_uniform(Real bound, Rng& rng);

 private:
  std::string name_;
  std::vector<std::size_t> shape_;
  std::vector<Real> data_;
  std::vector<Real> grad_;
  bool track_rows_ = false;
  std::vector<std::size_t> touched_;
  std::vector<std::uint8_t> touched_flag_;
};

// Non-owning list of trainable tensors.
using ParamList = std::vector<Tensor*>;

// p <- p - lr * grad(p) for every tensor, then clears gradients.
// Throws NumericError naming the first tensor holding a non-finite gradient;
// in that case no tensor is modified.
void sgd_step(const ParamList& params, Real lr);

enum class Mode { train, eval };

// Inverted dropout: entries are 0 with probability p, otherwise 1/(1-p).
// Eval mode yields all ones.
std::vector<Real> dropout_mask(std::size_t n, Real p, Mode mode, Rng& rng);

// Uniform initialization bound sqrt(3 / dim).
Real uniform_bound(std::size_t dim);

}  // namespace latticecws
