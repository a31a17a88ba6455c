#include "latticecws/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "latticecws/errors.hpp"

namespace latticecws {

Tensor::Tensor(std::string name, std::vector<std::size_t> shape, bool track_rows)
    : name_(std::move(name)), shape_(std::move(shape)), track_rows_(track_rows) {
  if (shape_.empty()) throw DimensionError("tensor '" + name_ + "' has an empty shape");
  for (auto extent : shape_) {
    if (extent == 0) throw DimensionError("tensor '" + name_ + "' has a zero extent");
  }
  const auto n = std::accumulate(shape_.begin(), shape_.end(), std::size_t{1},
                                 std::multiplies<>());
  data_.assign(n, 0.0);
  grad_.assign(n, 0.0);
  if (track_rows_) touched_flag_.assign(rows(), 0);
}

std::span<Real> Tensor::row(std::size_t r) {
  if (r >= rows()) throw DimensionError("row " + std::to_string(r) + " out of range for '" + name_ + "'");
  return std::span<Real>(data_).subspan(r * cols(), cols());
}

std::span<const Real> Tensor::row(std::size_t r) const {
  if (r >= rows()) throw DimensionError("row " + std::to_string(r) + " out of range for '" + name_ + "'");
  return std::span<const Real>(data_).subspan(r * cols(), cols());
}

std::span<Real> Tensor::grad_row(std::size_t r) {
  if (r >= rows()) throw DimensionError("row " + std::to_string(r) + " out of range for '" + name_ + "'");
  return std::span<Real>(grad_).subspan(r * cols(), cols());
}

void Tensor::mark_row(std::size_t r) {
  if (!track_rows_ || touched_flag_[r]) return;
  touched_flag_[r] = 1;
  touched_.push_back(r);
}

void Tensor::zero_grad() {
  if (track_rows_) {
    for (auto r : touched_) {
      auto g = grad_row(r);
      std::fill(g.begin(), g.end(), 0.0);
      touched_flag_[r] = 0;
    }
    touched_.clear();
    return;
  }
  std::fill(grad_.begin(), grad_.end(), 0.0);
}

void Tensor::fill(Real v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor::fill_uniform(Real bound, Rng& rng) {
  std::uniform_real_distribution<Real> dist(-bound, bound);
  for (auto& v : data_) v = dist(rng);
}

namespace {

template <typename F>
void for_each_grad(Tensor& t, F&& f) {
  if (t.tracks_rows()) {
    const auto cols = t.cols();
    auto data = t.data();
    auto grad = t.grad();
    for (auto r : t.touched_rows()) {
      for (std::size_t c = 0; c < cols; ++c) f(data[r * cols + c], grad[r * cols + c]);
    }
    return;
  }
  auto data = t.data();
  auto grad = t.grad();
  for (std::size_t i = 0; i < data.size(); ++i) f(data[i], grad[i]);
}

}  // namespace

void sgd_step(const ParamList& params, Real lr) {
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  for (auto* t : params) {
    for_each_grad(*t, [&](Real, Real g) {
      if (!std::isfinite(g)) throw NumericError("non-finite gradient in tensor '" + t->name() + "'");
    });
  }
  for (auto* t : params) {
    for_each_grad(*t, [lr](Real& p, Real g) { p -= lr * g; });
    t->zero_grad();
  }
}

std::vector<Real> dropout_mask(std::size_t n, Real p, Mode mode, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw ConfigError("dropout probability must lie in [0, 1)");
  std::vector<Real> mask(n, 1.0);
  if (mode == Mode::eval || p == 0.0) return mask;
  const Real keep = 1.0 / (1.0 - p);
  std::uniform_real_distribution<Real> unit(0.0, 1.0);
  for (auto& m : mask) m = unit(rng) < p ? 0.0 : keep;
  return mask;
}

Real uniform_bound(std::size_t dim) { return std::sqrt(3.0 / static_cast<Real>(dim)); }

}  // namespace latticecws
