#include "paac/tensor.hpp"

#include <cmath>

namespace paac {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(std::string("shape mismatch in ") + what);
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul");
  Matrix c(a.rows(), b.cols());
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  for (std::size_t i = 0; i < m; ++i) {
    real* ci = c.data() + i * n;
    const real* ai = a.data() + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const real aip = ai[p];
      const real* bp = b.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
  return c;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "matmul_at_b");
  Matrix c(a.cols(), b.cols());
  const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
  for (std::size_t p = 0; p < k; ++p) {
    const real* ap = a.data() + p * m;
    const real* bp = b.data() + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      real* ci = c.data() + i * n;
      const real api = ap[i];
      for (std::size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
    }
  }
  return c;
}

Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "matmul_a_bt");
  Matrix c(a.rows(), b.rows());
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  for (std::size_t i = 0; i < m; ++i) {
    const real* ai = a.data() + i * k;
    real* ci = c.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const real* bj = b.data() + j * k;
      real acc = 0;
      for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
      ci[j] = acc;
    }
  }
  return c;
}

void add_row_inplace(Matrix& m, std::span<const real> v) {
  require(v.size() == m.cols(), "add_row_inplace");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    real* row = m.data() + i * m.cols();
    for (std::size_t j = 0; j < m.cols(); ++j) row[j] += v[j];
  }
}

Matrix column_sums(const Matrix& m) {
  Matrix s(1, m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const real* row = m.data() + i * m.cols();
    for (std::size_t j = 0; j < m.cols(); ++j) s(0, j) += row[j];
  }
  return s;
}

bool all_finite(std::span<const real> values) {
  for (real v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace paac
