#include "wmq/field.hpp"

#include <algorithm>
#include <stdexcept>

namespace wmq {
namespace {

using Poly = std::vector<std::int64_t>;

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mul(const Poly& a, const Poly& b, std::int64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = (out[i + j] + a[i] * b[j]) % p;
  }
  trim(out);
  return out;
}

// Remainder of a modulo a monic divisor.
Poly poly_rem(Poly a, const Poly& d, std::int64_t p) {
  trim(a);
  const std::size_t dd = d.size() - 1;
  while (a.size() > dd) {
    const std::int64_t c = a.back();
    const std::size_t shift = a.size() - 1 - dd;
    if (c != 0) {
      for (std::size_t j = 0; j < dd; ++j) {
        a[shift + j] = ((a[shift + j] - c * d[j]) % p + p) % p;
      }
    }
    a.pop_back();
    trim(a);
  }
  return a;
}

bool poly_divides(const Poly& d, const Poly& f, std::int64_t p) {
  return poly_rem(f, d, p).empty();
}

// Trial division against every monic polynomial of degree 1..k/2.
bool poly_irreducible(const Poly& f, std::int64_t k, std::int64_t p) {
  for (std::int64_t deg = 1; 2 * deg <= k; ++deg) {
    Poly g(deg + 1, 0);
    g[deg] = 1;
    while (true) {
      if (poly_divides(g, f, p)) return false;
      // odometer over the deg low coefficients
      std::int64_t pos = 0;
      while (pos < deg && ++g[pos] == p) g[pos++] = 0;
      if (pos == deg) break;
    }
  }
  return true;
}

std::vector<std::int64_t> distinct_prime_factors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

void validate_element(const FieldSpec& f, const FieldElement& x) {
  if (static_cast<std::int64_t>(x.coeffs.size()) != f.k)
    throw std::invalid_argument("field element has wrong coefficient count");
  for (std::int64_t c : x.coeffs)
    if (c < 0 || c >= f.p) throw std::invalid_argument("field element coefficient out of range");
}

bool is_zero(const FieldElement& x) {
  return std::all_of(x.coeffs.begin(), x.coeffs.end(), [](std::int64_t c) { return c == 0; });
}

FieldElement reduce_to_element(const FieldSpec& f, Poly a) {
  a = poly_rem(std::move(a), f.modulus, f.p);
  a.resize(f.k, 0);
  return FieldElement{std::move(a)};
}

}  // namespace

FieldSpec make_field(std::int64_t p, std::int64_t k) {
  if (!is_prime(p)) throw std::invalid_argument("p must be prime");
  if (p % 2 == 0) throw std::invalid_argument("p must be odd");
  if (k < 1) throw std::invalid_argument("k must be positive");
  std::int64_t q = 1;
  for (std::int64_t i = 0; i < k; ++i) {
    q *= p;
    if (q > kMaxFieldSize) throw std::invalid_argument("field size q exceeds 2^20 cap");
  }

  FieldSpec f;
  f.p = p;
  f.k = k;
  f.q = q;

  if (k == 1) {
    f.modulus = {0, 1};  // plain Z_p
  } else {
    // Lexicographic scan, constant term compared first.
    std::int64_t span = q;  // p^k coefficient combinations
    bool found = false;
    for (std::int64_t m = 0; m < span && !found; ++m) {
      Poly cand(k + 1, 0);
      cand[k] = 1;
      std::int64_t rest = m;
      for (std::int64_t j = k - 1; j >= 0; --j) {
        cand[j] = rest % p;
        rest /= p;
      }
      if (poly_irreducible(cand, k, p)) {
        f.modulus = cand;
        found = true;
      }
    }
    if (!found) throw std::runtime_error("no irreducible modulus found");  // unreachable
  }

  const auto primes = distinct_prime_factors(q - 1);
  const FieldElement one = f.one();
  for (std::int64_t r = 1; r < q; ++r) {
    const FieldElement cand = elem_from_rank(f, r);
    bool ok = pow(f, cand, q - 1) == one;
    for (std::int64_t pr : primes) {
      if (!ok) break;
      if (pow(f, cand, (q - 1) / pr) == one) ok = false;
    }
    if (ok) {
      f.generator = cand;
      return f;
    }
  }
  throw std::runtime_error("no generator found");  // unreachable
}

std::int64_t elem_rank(const FieldSpec& f, const FieldElement& x) {
  validate_element(f, x);
  std::int64_t rank = 0;
  std::int64_t pw = 1;
  for (std::int64_t j = 0; j < f.k; ++j) {
    rank += x.coeffs[j] * pw;
    pw *= f.p;
  }
  return rank;
}

FieldElement elem_from_rank(const FieldSpec& f, std::int64_t rank) {
  if (rank < 0 || rank >= f.q) throw std::invalid_argument("rank out of [0, q)");
  std::vector<std::int64_t> c(f.k);
  for (std::int64_t j = 0; j < f.k; ++j) {
    c[j] = rank % f.p;
    rank /= f.p;
  }
  return FieldElement{std::move(c)};
}

FieldElement add(const FieldSpec& f, const FieldElement& x, const FieldElement& y) {
  validate_element(f, x);
  validate_element(f, y);
  FieldElement out = x;
  for (std::int64_t j = 0; j < f.k; ++j) out.coeffs[j] = (out.coeffs[j] + y.coeffs[j]) % f.p;
  return out;
}

FieldElement neg(const FieldSpec& f, const FieldElement& x) {
  validate_element(f, x);
  FieldElement out = x;
  for (std::int64_t j = 0; j < f.k; ++j) out.coeffs[j] = (f.p - out.coeffs[j]) % f.p;
  return out;
}

FieldElement sub(const FieldSpec& f, const FieldElement& x, const FieldElement& y) {
  return add(f, x, neg(f, y));
}

FieldElement mul(const FieldSpec& f, const FieldElement& x, const FieldElement& y) {
  validate_element(f, x);
  validate_element(f, y);
  return reduce_to_element(f, poly_mul(x.coeffs, y.coeffs, f.p));
}

FieldElement pow(const FieldSpec& f, const FieldElement& x, std::int64_t e) {
  validate_element(f, x);
  if (is_zero(x)) {
    if (e > 0) return f.zero();
    if (e == 0) return f.one();
    throw std::invalid_argument("cannot invert zero");
  }
  e %= (f.q - 1);
  if (e < 0) e += f.q - 1;
  FieldElement acc = f.one();
  FieldElement base = x;
  while (e > 0) {
    if (e & 1) acc = mul(f, acc, base);
    base = mul(f, base, base);
    e >>= 1;
  }
  return acc;
}

FieldElement inv(const FieldSpec& f, const FieldElement& x) {
  validate_element(f, x);
  if (is_zero(x)) throw std::invalid_argument("cannot invert zero");
  return pow(f, x, f.q - 2);
}

std::int64_t rank_add(const FieldSpec& f, std::int64_t a, std::int64_t b) {
  if (f.k == 1) return (a + b) % f.p;
  std::int64_t out = 0;
  std::int64_t pw = 1;
  for (std::int64_t j = 0; j < f.k; ++j) {
    out += ((a % f.p) + (b % f.p)) % f.p * pw;
    a /= f.p;
    b /= f.p;
    pw *= f.p;
  }
  return out;
}

std::int64_t rank_neg(const FieldSpec& f, std::int64_t a) {
  if (f.k == 1) return (f.p - a) % f.p;
  std::int64_t out = 0;
  std::int64_t pw = 1;
  for (std::int64_t j = 0; j < f.k; ++j) {
    out += (f.p - (a % f.p)) % f.p * pw;
    a /= f.p;
    pw *= f.p;
  }
  return out;
}

std::int64_t rank_sub(const FieldSpec& f, std::int64_t a, std::int64_t b) {
  return rank_add(f, a, rank_neg(f, b));
}

int legendre(const FieldSpec& f, const FieldElement& x) {
  validate_element(f, x);
  if (is_zero(x)) return 0;
  const FieldElement v = pow(f, x, (f.q - 1) / 2);
  if (v == f.one()) return 1;
  if (v == neg(f, f.one())) return -1;
  throw std::runtime_error("chi power did not land on +-1");  // unreachable
}

int legendre_bruteforce(const FieldSpec& f, const FieldElement& x) {
  validate_element(f, x);
  if (is_zero(x)) return 0;
  for (std::int64_t j = 1; j < f.q; ++j) {
    const FieldElement e = elem_from_rank(f, j);
    if (mul(f, e, e) == x) return 1;
  }
  return -1;
}

std::vector<int> chi_table(const FieldSpec& f) {
  std::vector<int> out(static_cast<std::size_t>(f.q));
  for (std::int64_t r = 0; r < f.q; ++r) out[r] = legendre(f, elem_from_rank(f, r));
  return out;
}

std::int64_t chi_inner_shifted(const FieldSpec& f, const std::vector<int>& chi,
                               std::int64_t rank_r, std::int64_t rank_s) {
  if (static_cast<std::int64_t>(chi.size()) != f.q)
    throw std::invalid_argument("chi table size mismatch");
  if (rank_r < 0 || rank_r >= f.q || rank_s < 0 || rank_s >= f.q)
    throw std::invalid_argument("rank out of [0, q)");
  std::int64_t sum = 0;
  for (std::int64_t i = 0; i < f.q; ++i)
    sum += static_cast<std::int64_t>(chi[rank_add(f, i, rank_r)]) * chi[rank_add(f, i, rank_s)];
  const std::int64_t expected = rank_r == rank_s ? f.q - 1 : -1;
  if (sum != expected) throw std::runtime_error("shifted character sum violates near-orthogonality");
  return sum;
}

std::int64_t chi_inner_shifted(const FieldSpec& f, const FieldElement& r, const FieldElement& s) {
  return chi_inner_shifted(f, chi_table(f), elem_rank(f, r), elem_rank(f, s));
}

std::string poly_to_string(const std::vector<std::int64_t>& coeffs) {
  std::string out;
  for (std::size_t j = coeffs.size(); j-- > 0;) {
    const std::int64_t c = coeffs[j];
    if (c == 0) continue;
    if (!out.empty()) out += " + ";
    if (j == 0) {
      out += std::to_string(c);
    } else {
      if (c != 1) out += std::to_string(c) + "*";
      out += j == 1 ? "x" : "x^" + std::to_string(j);
    }
  }
  return out.empty() ? "0" : out;
}

}  // namespace wmq
