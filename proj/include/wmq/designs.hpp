#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "wmq/field.hpp"
#include "wmq/types.hpp"

namespace wmq {

/// Square matrix over {-1, 0, +1}. claimed_weight, when present, is a
/// verified weight k: M * M^T == k * I holds exactly.
struct TernaryMatrix {
  IntMatrix entries;
  std::optional<int> claimed_weight;

  Index n() const { return entries.rows(); }
};

struct WeighingCertificate {
  Index n = 0;
  int k = 0;
  Eigen::VectorXi row_nonzeros;
  Eigen::VectorXi col_nonzeros;
  bool hadamard = false;  // k == n
};

/// Raised when M * M^T is not a multiple of the identity; carries the first
/// offending row pair.
class NotWeighingError : public std::runtime_error {
 public:
  NotWeighingError(Index row_a, Index row_b, long long value, const std::string& what)
      : std::runtime_error(what), row_a_(row_a), row_b_(row_b), value_(value) {}

  Index row_a() const { return row_a_; }
  Index row_b() const { return row_b_; }
  long long value() const { return value_; }

 private:
  Index row_a_;
  Index row_b_;
  long long value_;
};

inline constexpr Index kMaxMatrixDim = 4096;

/// Exact integer check of M * M^T == k * I. Returns the certificate with the
/// unique k on success and throws NotWeighingError otherwise.
WeighingCertificate verify_weighing(const TernaryMatrix& m);

/// verify_weighing + stamp the weight onto the matrix.
TernaryMatrix certify(TernaryMatrix m);

/// Kronecker product of two verified weighing matrices; weight k1 * k2.
TernaryMatrix tensor(const TernaryMatrix& a, const TernaryMatrix& b);

/// 2^t x 2^t matrix with entry (r, c) = (-1)^<r, c> (bitwise inner product);
/// weight 2^t.
TernaryMatrix sylvester(int t);

/// (q+1) x (q+1) Hadamard matrix for odd prime powers q = 3 mod 4, built by
/// bordering the skew chi-difference matrix.
TernaryMatrix paley_one(std::int64_t q);

/// (2q+2) x (2q+2) Hadamard matrix for odd prime powers q = 1 mod 4, built by
/// doubling the symmetric conference matrix.
TernaryMatrix paley_two(std::int64_t q);

/// q x q matrix L with L(i, j) = chi(i + j) in rank order. Not a weighing
/// matrix: it satisfies L^T * L = q * I - J instead.
TernaryMatrix legendre_matrix(const FieldSpec& f);

/// The 4x4 weighing matrix of weight 3 used as the base of the w43 family.
TernaryMatrix w43_base();

/// t-fold tensor power of w43_base(); weight 3^t.
TernaryMatrix w43_power(int t);

TernaryMatrix identity_matrix(Index n);

/// Matrix file format: line 1 is "n k" (k = -1 when no verified weight),
/// then n rows of exactly n characters from {+, -, 0}, each newline
/// terminated. A claimed weight is re-verified on parse.
TernaryMatrix parse_matrix(const std::string& text);
std::string serialize_matrix(const TernaryMatrix& m);

}  // namespace wmq
