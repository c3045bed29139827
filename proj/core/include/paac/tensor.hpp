#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace paac {

#ifdef PAAC_SINGLE_PRECISION
using real = float;
#else
using real = double;
#endif

/// Bad configuration or shape mismatch. Fails fast, no silent broadcast.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Training produced a non-finite quantity.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem / serialization failure.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// An operation was called in a state its contract forbids.
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// Dense row-major matrix of `real`. The only tensor type in the numeric
/// core; vectors are 1xN or Nx1 matrices or plain std::vector<real>.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, real fill = real(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  real& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  real operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  real* data() { return data_.data(); }
  const real* data() const { return data_.data(); }

  std::span<real> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const real> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<real> flat() { return {data_.data(), data_.size()}; }
  std::span<const real> flat() const { return {data_.data(), data_.size()}; }

  void fill(real v) { data_.assign(data_.size(), v); }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<real> data_;
};

/// c = a * b, a is (m,k), b is (k,n).
Matrix matmul(const Matrix& a, const Matrix& b);

/// c = a^T * b, a is (k,m), b is (k,n), result (m,n).
Matrix matmul_at_b(const Matrix& a, const Matrix& b);

/// c = a * b^T, a is (m,k), b is (n,k), result (m,n).
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);

/// Adds `v` to every row of `m` in place. v.size() must equal m.cols().
void add_row_inplace(Matrix& m, std::span<const real> v);

/// Column sums of `m` as a 1 x cols matrix.
Matrix column_sums(const Matrix& m);

bool all_finite(std::span<const real> values);

}  // namespace paac
