#pragma once

// Low-rank adaptation of a frozen weight matrix:
//
//   delta = alpha * A * B,   effective = W + delta,   y = effective * x
//
// with A of shape (m x r) and B of shape (r x n). The square case m = n = d
// is the usual one; nothing here depends on it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "msaeval/error.hpp"
#include "msaeval/rng.hpp"

namespace msaeval {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw DimensionError("matrix dimensions must be positive");
  }

  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    if (rows_ == 0 || cols_ == 0) throw DimensionError("matrix dimensions must be positive");
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionError("ragged matrix initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool all_finite() const {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline std::string shape_string(const Matrix& m) {
  return "(" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")";
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("cannot multiply " + shape_string(a) + " by " + shape_string(b));
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

inline std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size())
    throw DimensionError("cannot multiply " + shape_string(a) + " by a vector of length " + std::to_string(x.size()));
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  }
  return y;
}

// a^T x
inline std::vector<double> matvec_transposed(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size())
    throw DimensionError("cannot multiply transpose of " + shape_string(a) + " by a vector of length " +
                         std::to_string(x.size()));
  std::vector<double> y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * x[i];
  }
  return y;
}

struct LoraAdapter {
  Matrix a;  // (m x r)
  Matrix b;  // (r x n)
  double alpha = 1.0;

  std::size_t rank() const { return a.cols(); }
  std::size_t rows() const { return a.rows(); }
  std::size_t cols() const { return b.cols(); }

  void validate() const {
    if (a.cols() != b.rows())
      throw DimensionError("adapter rank mismatch: A " + shape_string(a) + ", B " + shape_string(b));
    if (rank() > std::min(rows(), cols()))
      throw DimensionError("adapter rank " + std::to_string(rank()) + " exceeds matrix dimension");
    if (!std::isfinite(alpha) || alpha <= 0.0) throw DimensionError("adapter alpha must be positive");
    if (!a.all_finite() || !b.all_finite()) throw NumericError("adapter entries must be finite");
  }
};

// A ~ N(0, stddev^2), B = 0, so the initial update is exactly zero.
inline LoraAdapter init_adapter(std::size_t rows, std::size_t cols, std::size_t rank, double alpha,
                                std::uint64_t seed, double stddev = 0.02) {
  LoraAdapter ad{Matrix(rows, rank), Matrix(rank, cols), alpha};
  Xoshiro256 rng(seed);
  for (double& v : ad.a.data()) v = rng.gaussian(0.0, stddev);
  ad.validate();
  return ad;
}

inline Matrix delta_w(const LoraAdapter& adapter) {
  adapter.validate();
  Matrix out = matmul(adapter.a, adapter.b);
  for (double& v : out.data()) v *= adapter.alpha;
  return out;
}

inline Matrix effective_weight(const Matrix& base, const LoraAdapter& adapter) {
  Matrix delta = delta_w(adapter);
  if (base.rows() != delta.rows() || base.cols() != delta.cols())
    throw DimensionError("base " + shape_string(base) + " does not match adapter update " + shape_string(delta));
  auto d = delta.data();
  auto b = base.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += b[i];
  return delta;
}

// y = W x + alpha * A (B x)
inline std::vector<double> adapted_forward(const Matrix& base, const LoraAdapter& adapter, std::span<const double> x) {
  adapter.validate();
  if (base.rows() != adapter.rows() || base.cols() != adapter.cols())
    throw DimensionError("base " + shape_string(base) + " does not match adapter shape");
  std::vector<double> y = matvec(base, x);
  std::vector<double> bx = matvec(adapter.b, x);
  std::vector<double> abx = matvec(adapter.a, bx);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += adapter.alpha * abx[i];
  return y;
}

struct AdapterGradients {
  Matrix a;  // same shape as adapter.a
  Matrix b;  // same shape as adapter.b
};

// Gradients of a loss with respect to A and B, given dL/dy for the output of
// adapted_forward. The frozen base receives no gradient:
//   dL/dA = alpha * g (B x)^T,   dL/dB = alpha * (A^T g) x^T
inline AdapterGradients adapter_gradients(const Matrix& base, const LoraAdapter& adapter,
                                          std::span<const double> input, std::span<const double> loss_grad) {
  adapter.validate();
  if (base.rows() != adapter.rows() || base.cols() != adapter.cols())
    throw DimensionError("base " + shape_string(base) + " does not match adapter shape");
  if (input.size() != adapter.cols())
    throw DimensionError("input length " + std::to_string(input.size()) + " does not match " +
                         std::to_string(adapter.cols()));
  if (loss_grad.size() != adapter.rows())
    throw DimensionError("loss gradient length " + std::to_string(loss_grad.size()) + " does not match " +
                         std::to_string(adapter.rows()));

  const std::vector<double> bx = matvec(adapter.b, input);
  const std::vector<double> atg = matvec_transposed(adapter.a, loss_grad);

  AdapterGradients g{Matrix(adapter.a.rows(), adapter.a.cols()), Matrix(adapter.b.rows(), adapter.b.cols())};
  for (std::size_t i = 0; i < g.a.rows(); ++i) {
    for (std::size_t j = 0; j < g.a.cols(); ++j) g.a(i, j) = adapter.alpha * loss_grad[i] * bx[j];
  }
  for (std::size_t j = 0; j < g.b.rows(); ++j) {
    for (std::size_t k = 0; k < g.b.cols(); ++k) g.b(j, k) = adapter.alpha * atg[j] * input[k];
  }
  return g;
}

}  // namespace msaeval
