#include "sknn/matrix.hpp"

#include <numeric>
#include <string>
#include <utility>

#include "sknn/errors.hpp"

namespace sknn {

Matrix Matrix::identity(std::size_t n) {
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1;
  return out;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return {};
  Matrix out(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != out.cols()) {
      throw DimensionMismatch("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                              " entries, expected " + std::to_string(out.cols()));
    }
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = rows[r][c];
  }
  return out;
}

Vector Matrix::column(std::size_t c) const {
  Vector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Rational acc = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  }
  return out;
}

Permutation::Permutation(std::vector<std::size_t> indices) : map_(std::move(indices)) {
  std::vector<bool> seen(map_.size(), false);
  for (std::size_t v : map_) {
    if (v >= map_.size() || seen[v]) throw InvalidParams("permutation is not a bijection");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return Permutation(std::move(idx));
}

Permutation Permutation::random(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(idx.begin(), idx.end());
  return Permutation(std::move(idx));
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(map_.size());
  for (std::size_t j = 0; j < map_.size(); ++j) inv[map_[j]] = j;
  return Permutation(std::move(inv));
}

Matrix apply_perm_columns(const Matrix& m, const Permutation& pi) {
  if (pi.size() != m.cols()) {
    throw DimensionMismatch("permutation of length " + std::to_string(pi.size()) + " applied to " +
                            std::to_string(m.cols()) + " columns");
  }
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(r, j) = m(r, pi[j]);
  }
  return out;
}

namespace {

Integer common_denominator(const Matrix& m) {
  Integer l = 1;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (const auto& x : m.row(r)) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  }
  return l;
}

// Integer rows (n x width); eliminates below the diagonal of the first n
// columns in place. Every intermediate entry is a minor of the input, so
// each division is exact. Returns false when a pivot column is all zero.
bool bareiss_forward(std::vector<std::vector<Integer>>& a, std::size_t n, int& sign) {
  const std::size_t width = a.empty() ? 0 : a.front().size();
  Integer prev = 1;
  sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t swap_with = k + 1;
      while (swap_with < n && a[swap_with][k] == 0) ++swap_with;
      if (swap_with == n) return false;
      std::swap(a[k], a[swap_with]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < width; ++j) {
        Integer t = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return true;
}

std::vector<std::vector<Integer>> integerize(const Matrix& m, const Integer& scale, std::size_t extra_cols) {
  std::vector<std::vector<Integer>> a(m.rows(), std::vector<Integer>(m.cols() + extra_cols));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      Rational scaled = m(r, c) * scale;
      a[r][c] = scaled.get_num();
    }
  }
  return a;
}

}  // namespace

Rational determinant(const Matrix& m) {
  if (!m.square()) throw DimensionMismatch("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  Integer scale = common_denominator(m);
  auto a = integerize(m, scale, 0);
  int sign = 1;
  if (!bareiss_forward(a, n, sign)) return 0;
  Integer scale_n;
  mpz_pow_ui(scale_n.get_mpz_t(), scale.get_mpz_t(), n);
  Rational det(a[n - 1][n - 1] * sign, scale_n);
  det.canonicalize();
  return det;
}

Matrix invert(const Matrix& m) {
  if (!m.square()) throw DimensionMismatch("inverse of a non-square matrix");
  const std::size_t n = m.rows();
  Integer scale = common_denominator(m);
  auto a = integerize(m, scale, n);
  for (std::size_t i = 0; i < n; ++i) a[i][n + i] = 1;
  int sign = 1;
  if (!bareiss_forward(a, n, sign) || (n > 0 && a[n - 1][n - 1] == 0)) {
    throw SingularMatrix("matrix is singular");
  }

  // (scale * m) x = e_c  =>  m^{-1} = scale * x
  Matrix out(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t ii = n; ii-- > 0;) {
      Rational acc = a[ii][n + col];
      for (std::size_t j = ii + 1; j < n; ++j) acc -= a[ii][j] * out(j, col);
      acc /= a[ii][ii];
      out(ii, col) = acc;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) *= scale;
  }
  return out;
}

Matrix sample_invertible(std::size_t n, Rng& rng, const EntryRange& range, int max_attempts) {
  if (n == 0) throw InvalidParams("matrix dimension must be positive");
  if (range.step <= 0 || range.hi < range.lo) throw InvalidParams("empty entry range");
  Rational steps_q = (range.hi - range.lo) / range.step;
  if (!is_integer(steps_q)) throw InvalidParams("entry range is not a whole number of steps");
  const std::uint64_t steps = steps_q.get_num().get_ui();
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Matrix out(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        out(r, c) = range.lo + range.step * Rational(rng.uniform(0, steps));
      }
    }
    if (determinant(out) != 0) return out;
  }
  throw ResampleExhausted("no invertible matrix after " + std::to_string(max_attempts) + " draws");
}

Vector vec_mat_mul(std::span<const Rational> v, const Matrix& m) {
  if (v.size() != m.rows()) throw DimensionMismatch("vector length does not match matrix rows");
  Vector out(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    Rational acc = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) acc += v[i] * m(i, j);
    out[j] = acc;
  }
  return out;
}

Vector mat_vec_mul(const Matrix& m, std::span<const Rational> v) {
  if (v.size() != m.cols()) throw DimensionMismatch("vector length does not match matrix columns");
  Vector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = dot(m.row(i), v);
  return out;
}

Rational dot(std::span<const Rational> u, std::span<const Rational> v) {
  if (u.size() != v.size()) throw DimensionMismatch("dot product of unequal lengths");
  Rational acc = 0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc;
}

ScaledIntMatrix ScaledIntMatrix::from(const Matrix& m) {
  ScaledIntMatrix out;
  out.rows = m.rows();
  out.cols = m.cols();
  out.denominator = common_denominator(m);
  out.numerators.reserve(m.rows() * m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (const auto& x : m.row(r)) {
      Rational scaled = x * out.denominator;
      out.numerators.push_back(scaled.get_num());
    }
  }
  return out;
}

}  // namespace sknn
