#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sknn/matrix.hpp"
#include "sknn/paillier.hpp"

// Hot loops of the schemes. Each kernel has a serial reference and an
// OpenMP version over rows; both produce identical results and counts.
namespace sknn::kernels {

enum class Exec { serial, parallel };

/// out[r] = rows[r] * m. Adds rows.size() * m.rows * m.cols to *macs.
std::vector<Vector> rows_times_matrix(const std::vector<Vector>& rows, const ScaledIntMatrix& m, Exec exec,
                                      std::uint64_t* macs = nullptr);

/// out[r] = rows[r] . q. Adds rows.size() * q.size() to *macs.
std::vector<Rational> dot_each(const std::vector<Vector>& rows, std::span<const Integer> q, Exec exec,
                               std::uint64_t* macs = nullptr);

/// out[i] = prod_j v[j]^exps(i, j) mod n^2, i.e. E(sum_j exps(i,j) m_j).
/// `exps` must be integral (denominator 1). Adds rows * cols to *exps_done.
std::vector<paillier::Ciphertext> encrypted_mat_vec(const paillier::PublicKey& pk, const ScaledIntMatrix& exps,
                                                    const std::vector<paillier::Ciphertext>& v, Exec exec,
                                                    std::uint64_t* exps_done = nullptr);

/// Indices of the k smallest scores; ties go to the lower index. Result is
/// ordered by (score, index).
std::vector<std::size_t> select_k_smallest(std::span<const Rational> scores, std::size_t k);

}  // namespace sknn::kernels
