#include "sknn/kernels.hpp"

#include <algorithm>
#include <numeric>

#include "sknn/errors.hpp"

namespace sknn::kernels {

namespace {

Vector row_times(const Vector& row, const ScaledIntMatrix& m) {
  Integer l = 1;
  for (const auto& x : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  IntVector a(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) a[i] = row[i].get_num() * (l / row[i].get_den());
  Integer den = l * m.denominator;
  Vector out(m.cols);
  Integer acc;
  for (std::size_t j = 0; j < m.cols; ++j) {
    acc = 0;
    for (std::size_t i = 0; i < m.rows; ++i) mpz_addmul(acc.get_mpz_t(), a[i].get_mpz_t(), m.at(i, j).get_mpz_t());
    out[j] = Rational(acc, den);
    out[j].canonicalize();
  }
  return out;
}

Rational row_dot(const Vector& row, std::span<const Integer> q) {
  Rational acc = 0;
  for (std::size_t i = 0; i < q.size(); ++i) acc += row[i] * q[i];
  return acc;
}

paillier::Ciphertext exp_row(const paillier::PublicKey& pk, const ScaledIntMatrix& exps, std::size_t i,
                             const std::vector<paillier::Ciphertext>& v) {
  paillier::Ciphertext acc = paillier::hom_scale(pk, v[0], exps.at(i, 0));
  for (std::size_t j = 1; j < exps.cols; ++j) acc = paillier::hom_add(pk, acc, paillier::hom_scale(pk, v[j], exps.at(i, j)));
  return acc;
}

}  // namespace

std::vector<Vector> rows_times_matrix(const std::vector<Vector>& rows, const ScaledIntMatrix& m, Exec exec,
                                      std::uint64_t* macs) {
  for (const auto& r : rows) {
    if (r.size() != m.rows) throw DimensionMismatch("row length does not match matrix");
  }
  const long n = static_cast<long>(rows.size());
  std::vector<Vector> out(rows.size());
  std::uint64_t count = 0;
  const std::uint64_t per_row = static_cast<std::uint64_t>(m.rows) * m.cols;
  if (exec == Exec::serial) {
    for (long r = 0; r < n; ++r) {
      out[r] = row_times(rows[r], m);
      count += per_row;
    }
  } else {
#pragma omp parallel for schedule(dynamic) reduction(+ : count)
    for (long r = 0; r < n; ++r) {
      out[r] = row_times(rows[r], m);
      count += per_row;
    }
  }
  if (macs != nullptr) *macs += count;
  return out;
}

std::vector<Rational> dot_each(const std::vector<Vector>& rows, std::span<const Integer> q, Exec exec,
                               std::uint64_t* macs) {
  for (const auto& r : rows) {
    if (r.size() != q.size()) throw DimensionMismatch("row length does not match query");
  }
  const long n = static_cast<long>(rows.size());
  std::vector<Rational> out(rows.size());
  std::uint64_t count = 0;
  if (exec == Exec::serial) {
    for (long r = 0; r < n; ++r) {
      out[r] = row_dot(rows[r], q);
      count += q.size();
    }
  } else {
#pragma omp parallel for schedule(static) reduction(+ : count)
    for (long r = 0; r < n; ++r) {
      out[r] = row_dot(rows[r], q);
      count += q.size();
    }
  }
  if (macs != nullptr) *macs += count;
  return out;
}

std::vector<paillier::Ciphertext> encrypted_mat_vec(const paillier::PublicKey& pk, const ScaledIntMatrix& exps,
                                                    const std::vector<paillier::Ciphertext>& v, Exec exec,
                                                    std::uint64_t* exps_done) {
  if (exps.denominator != 1) throw DomainError("exponent matrix must be integral");
  if (exps.cols != v.size() || exps.cols == 0) throw DimensionMismatch("exponent matrix does not match vector");
  const long n = static_cast<long>(exps.rows);
  std::vector<paillier::Ciphertext> out(exps.rows);
  if (exec == Exec::serial) {
    for (long i = 0; i < n; ++i) out[i] = exp_row(pk, exps, static_cast<std::size_t>(i), v);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) out[i] = exp_row(pk, exps, static_cast<std::size_t>(i), v);
  }
  if (exps_done != nullptr) *exps_done += static_cast<std::uint64_t>(exps.rows) * exps.cols;
  return out;
}

std::vector<std::size_t> select_k_smallest(std::span<const Rational> scores, std::size_t k) {
  if (k > scores.size()) throw KTooLarge("k exceeds database size");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    int c = cmp(scores[a], scores[b]);
    return c != 0 ? c < 0 : a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(k), idx.end(), less);
  idx.resize(k);
  return idx;
}

}  // namespace sknn::kernels
