#pragma once

#include <Eigen/Core>
#include <Eigen/StdVector>

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace motionstyle::nn {

/// Dense rank-3 array laid out [batch, time, channel], row-major.
/// Vectors are stored as [batch, 1, channel] and scalars as [1, 1, 1].
/// Storage is packet-aligned: Eigen peels unaligned heads off vectorized
/// reductions, so with malloc alignment the summation order (and the last
/// bits of every result) would depend on heap addresses.
template <typename T>
class Tensor {
 public:
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;

  Tensor() = default;
  Tensor(int n, int t, int c, T fill = T(0))
      : n_(n), t_(t), c_(c), data_(static_cast<std::size_t>(n) * t * c, fill) {
    assert(n >= 0 && t >= 0 && c >= 0);
  }

  static Tensor scalar(T v) { return Tensor(1, 1, 1, v); }

  int n() const { return n_; }
  int t() const { return t_; }
  int c() const { return c_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool same_shape(const Tensor& o) const { return n_ == o.n_ && t_ == o.t_ && c_ == o.c_; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> span() { return data_; }
  std::span<const T> span() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  T operator[](std::size_t i) const { return data_[i]; }

  T& at(int b, int t, int c) { return data_[index(b, t, c)]; }
  T at(int b, int t, int c) const { return data_[index(b, t, c)]; }

  T* row(int b, int t) { return data_.data() + index(b, t, 0); }
  const T* row(int b, int t) const { return data_.data() + index(b, t, 0); }

  /// (n*t) x c view.
  MatrixMap mat() { return MatrixMap(data_.data(), static_cast<Eigen::Index>(n_) * t_, c_); }
  ConstMatrixMap mat() const {
    return ConstMatrixMap(data_.data(), static_cast<Eigen::Index>(n_) * t_, c_);
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(n_, t_, c_);
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
    return out;
  }

 private:
  std::size_t index(int b, int t, int c) const {
    assert(b < n_ && t < t_ && c < c_);
    return (static_cast<std::size_t>(b) * t_ + t) * c_ + c;
  }

  int n_ = 0;
  int t_ = 0;
  int c_ = 0;
  std::vector<T, Eigen::aligned_allocator<T>> data_;
};

}  // namespace motionstyle::nn
