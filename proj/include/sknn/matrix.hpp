#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sknn/rational.hpp"
#include "sknn/rng.hpp"

namespace sknn {

/// Dense row-major matrix of exact rationals.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n);
  /// Throws DimensionMismatch on ragged input.
  static Matrix from_rows(const std::vector<Vector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const Rational> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  Vector column(std::size_t c) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);

/// Bijection on {0, ..., n-1} stored as an index array.
class Permutation {
 public:
  Permutation() = default;
  /// Throws InvalidParams unless `indices` is a bijection.
  explicit Permutation(std::vector<std::size_t> indices);

  static Permutation identity(std::size_t n);
  static Permutation random(std::size_t n, Rng& rng);

  std::size_t size() const { return map_.size(); }
  std::size_t operator[](std::size_t j) const { return map_[j]; }
  const std::vector<std::size_t>& indices() const { return map_; }
  Permutation inverse() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> map_;
};

/// Column j of the result is column pi[j] of `m`.
Matrix apply_perm_columns(const Matrix& m, const Permutation& pi);

/// Determinant by fraction-free (Bareiss) elimination.
Rational determinant(const Matrix& m);

/// Exact inverse: Bareiss forward elimination on the integerized augmented
/// system followed by rational back-substitution. Throws SingularMatrix.
Matrix invert(const Matrix& m);

/// Entries are lo, lo+step, ..., hi.
struct EntryRange {
  Rational lo{1, 10};
  Rational hi{99, 10};
  Rational step{1, 10};
};

/// Uniform entries from `range`, resampled until invertible. Throws
/// ResampleExhausted after `max_attempts` singular draws.
Matrix sample_invertible(std::size_t n, Rng& rng, const EntryRange& range = {}, int max_attempts = 64);

/// Row vector times matrix.
Vector vec_mat_mul(std::span<const Rational> v, const Matrix& m);
/// Matrix times column vector.
Vector mat_vec_mul(const Matrix& m, std::span<const Rational> v);
Rational dot(std::span<const Rational> u, std::span<const Rational> v);

/// Rational matrix stored as integer numerators over one shared denominator.
struct ScaledIntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Integer> numerators;
  Integer denominator = 1;

  static ScaledIntMatrix from(const Matrix& m);
  const Integer& at(std::size_t r, std::size_t c) const { return numerators[r * cols + c]; }
};

}  // namespace sknn
