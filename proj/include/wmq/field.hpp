#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wmq {

/// Element of F_{p^k}: exactly k residues mod p, constant term first.
struct FieldElement {
  std::vector<std::int64_t> coeffs;

  friend bool operator==(const FieldElement&, const FieldElement&) = default;
};

/// A concrete finite field F_{p^k} for an odd prime p. The modulus is the
/// lexicographically smallest irreducible monic polynomial of degree k
/// (coefficients compared constant-term-first), and the generator is the
/// rank-smallest element of multiplicative order q-1, so two fields built
/// with the same (p, k) are identical.
struct FieldSpec {
  std::int64_t p = 0;
  std::int64_t k = 0;
  std::int64_t q = 0;                  // p^k
  std::vector<std::int64_t> modulus;   // monic, degree k, constant term first
  FieldElement generator;

  FieldElement zero() const { return FieldElement{std::vector<std::int64_t>(k, 0)}; }
  FieldElement one() const {
    std::vector<std::int64_t> c(k, 0);
    c[0] = 1;
    return FieldElement{c};
  }
};

inline constexpr std::int64_t kMaxFieldSize = std::int64_t{1} << 20;

FieldSpec make_field(std::int64_t p, std::int64_t k);

/// Canonical bijection F_q <-> {0..q-1}: rank(x) = sum_j coeffs[j] * p^j.
/// Ranks index oracle tables and matrix rows everywhere in this library.
std::int64_t elem_rank(const FieldSpec& f, const FieldElement& x);
FieldElement elem_from_rank(const FieldSpec& f, std::int64_t rank);

FieldElement add(const FieldSpec& f, const FieldElement& x, const FieldElement& y);
FieldElement neg(const FieldSpec& f, const FieldElement& x);
FieldElement sub(const FieldSpec& f, const FieldElement& x, const FieldElement& y);
FieldElement mul(const FieldSpec& f, const FieldElement& x, const FieldElement& y);
FieldElement inv(const FieldSpec& f, const FieldElement& x);

/// x^e with exponent reduction mod q-1 for nonzero bases; negative exponents
/// are allowed for nonzero x.
FieldElement pow(const FieldSpec& f, const FieldElement& x, std::int64_t e);

// Addition in F_q is digitwise mod p on base-p ranks, so these avoid the
// coefficient-vector round trip in inner loops.
std::int64_t rank_add(const FieldSpec& f, std::int64_t a, std::int64_t b);
std::int64_t rank_neg(const FieldSpec& f, std::int64_t a);
std::int64_t rank_sub(const FieldSpec& f, std::int64_t a, std::int64_t b);

/// Quadratic character chi of F_q: 0 at zero, +1 on nonzero squares, -1 on
/// non-squares. Evaluated as x^((q-1)/2) by square-and-multiply.
int legendre(const FieldSpec& f, const FieldElement& x);

/// Same value as legendre(), computed by enumerating all j and testing
/// j^2 == x. Slow; kept as an independent cross-check.
int legendre_bruteforce(const FieldSpec& f, const FieldElement& x);

/// chi over the whole field, indexed by element rank.
std::vector<int> chi_table(const FieldSpec& f);

/// sum_{i in F_q} chi(i+r) * chi(i+s). Equals q-1 when r == s and -1
/// otherwise; the result is checked against that identity before returning.
std::int64_t chi_inner_shifted(const FieldSpec& f, const FieldElement& r, const FieldElement& s);
std::int64_t chi_inner_shifted(const FieldSpec& f, const std::vector<int>& chi,
                               std::int64_t rank_r, std::int64_t rank_s);

std::string poly_to_string(const std::vector<std::int64_t>& coeffs);

}  // namespace wmq
