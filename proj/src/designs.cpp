#include "wmq/designs.hpp"

#include <sstream>
#include <utility>

namespace wmq {
namespace {

void check_ternary_square(const TernaryMatrix& m) {
  if (m.entries.rows() != m.entries.cols()) throw std::invalid_argument("matrix must be square");
  if (m.entries.rows() < 1) throw std::invalid_argument("matrix must be nonempty");
  if (m.entries.rows() > kMaxMatrixDim) throw std::invalid_argument("matrix dimension exceeds 4096 cap");
  for (Index i = 0; i < m.entries.rows(); ++i)
    for (Index j = 0; j < m.entries.cols(); ++j)
      if (m.entries(i, j) < -1 || m.entries(i, j) > 1)
        throw std::invalid_argument("matrix entries must be in {-1, 0, +1}");
}

std::pair<std::int64_t, std::int64_t> split_odd_prime_power(std::int64_t q) {
  if (q < 3 || q % 2 == 0) throw std::invalid_argument("q must be an odd prime power");
  std::int64_t p = q;
  for (std::int64_t d = 3; d * d <= q; d += 2) {
    if (q % d == 0) {
      p = d;
      break;
    }
  }
  std::int64_t k = 0, r = q;
  while (r % p == 0) {
    r /= p;
    ++k;
  }
  if (r != 1) throw std::invalid_argument("q must be an odd prime power");
  return {p, k};
}

}  // namespace

WeighingCertificate verify_weighing(const TernaryMatrix& m) {
  check_ternary_square(m);
  const Index n = m.n();
  const IntMatrix gram = m.entries * m.entries.transpose();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (gram(i, j) != 0) {
        std::ostringstream msg;
        msg << "rows " << i << " and " << j << " are not orthogonal (dot = " << gram(i, j) << ")";
        throw NotWeighingError(i, j, gram(i, j), msg.str());
      }
    }
  }
  const int k = gram(0, 0);
  for (Index i = 1; i < n; ++i) {
    if (gram(i, i) != k) {
      std::ostringstream msg;
      msg << "rows 0 and " << i << " have different nonzero counts (" << k << " vs " << gram(i, i)
          << ")";
      throw NotWeighingError(0, i, gram(i, i), msg.str());
    }
  }

  WeighingCertificate cert;
  cert.n = n;
  cert.k = k;
  cert.hadamard = (k == n);
  cert.row_nonzeros = gram.diagonal();
  cert.col_nonzeros = Eigen::VectorXi::Zero(n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) cert.col_nonzeros(j) += m.entries(i, j) != 0;
  return cert;
}

TernaryMatrix certify(TernaryMatrix m) {
  m.claimed_weight = verify_weighing(m).k;
  return m;
}

TernaryMatrix tensor(const TernaryMatrix& a, const TernaryMatrix& b) {
  if (!a.claimed_weight || !b.claimed_weight)
    throw std::invalid_argument("tensor requires verified weighing matrices");
  const Index na = a.n(), nb = b.n();
  if (na * nb > kMaxMatrixDim) throw std::invalid_argument("tensor dimension exceeds 4096 cap");
  TernaryMatrix out;
  out.entries.resize(na * nb, na * nb);
  for (Index i = 0; i < na; ++i)
    for (Index j = 0; j < na; ++j)
      out.entries.block(i * nb, j * nb, nb, nb) = a.entries(i, j) * b.entries;
  out.claimed_weight = *a.claimed_weight * *b.claimed_weight;
  return out;
}

TernaryMatrix sylvester(int t) {
  if (t < 1) throw std::invalid_argument("t must be positive");
  if (t > 12) throw std::invalid_argument("sylvester dimension exceeds 4096 cap");
  const Index n = Index{1} << t;
  TernaryMatrix out;
  out.entries.resize(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c)
      out.entries(r, c) = __builtin_popcountll(static_cast<unsigned long long>(r & c)) % 2 ? -1 : 1;
  out.claimed_weight = static_cast<int>(n);
  return out;
}

TernaryMatrix paley_one(std::int64_t q) {
  const auto [p, k] = split_odd_prime_power(q);
  if (q % 4 != 3) throw std::invalid_argument("paley_one requires q = 3 mod 4");
  if (q + 1 > kMaxMatrixDim) throw std::invalid_argument("paley_one dimension exceeds 4096 cap");
  const FieldSpec f = make_field(p, k);
  const auto chi = chi_table(f);

  // H = I + S with S skew: S(0, c) = 1, S(r, 0) = -1, S(r, c) = chi(x_r - x_c).
  TernaryMatrix out;
  out.entries.resize(q + 1, q + 1);
  out.entries(0, 0) = 1;
  for (std::int64_t j = 0; j < q; ++j) {
    out.entries(0, j + 1) = 1;
    out.entries(j + 1, 0) = -1;
  }
  for (std::int64_t a = 0; a < q; ++a)
    for (std::int64_t b = 0; b < q; ++b)
      out.entries(a + 1, b + 1) = chi[rank_sub(f, a, b)] + (a == b ? 1 : 0);
  out.claimed_weight = static_cast<int>(q + 1);
  return out;
}

TernaryMatrix paley_two(std::int64_t q) {
  const auto [p, k] = split_odd_prime_power(q);
  if (q % 4 != 1) throw std::invalid_argument("paley_two requires q = 1 mod 4");
  if (2 * q + 2 > kMaxMatrixDim) throw std::invalid_argument("paley_two dimension exceeds 4096 cap");
  const FieldSpec f = make_field(p, k);
  const auto chi = chi_table(f);

  // Symmetric conference matrix C, then each entry becomes a 2x2 block:
  // 0 -> D, +1 -> K, -1 -> -K with K = [[1,1],[1,-1]], D = [[1,-1],[-1,-1]].
  IntMatrix conf(q + 1, q + 1);
  conf(0, 0) = 0;
  for (std::int64_t j = 0; j < q; ++j) {
    conf(0, j + 1) = 1;
    conf(j + 1, 0) = 1;
  }
  for (std::int64_t a = 0; a < q; ++a)
    for (std::int64_t b = 0; b < q; ++b) conf(a + 1, b + 1) = chi[rank_sub(f, a, b)];

  IntMatrix kblock(2, 2), dblock(2, 2);
  kblock << 1, 1, 1, -1;
  dblock << 1, -1, -1, -1;
  TernaryMatrix out;
  out.entries.resize(2 * q + 2, 2 * q + 2);
  for (Index i = 0; i <= q; ++i)
    for (Index j = 0; j <= q; ++j)
      out.entries.block(2 * i, 2 * j, 2, 2) =
          conf(i, j) * kblock + (i == j ? dblock : IntMatrix::Zero(2, 2));
  out.claimed_weight = static_cast<int>(2 * q + 2);
  return out;
}

TernaryMatrix legendre_matrix(const FieldSpec& f) {
  if (f.q > kMaxMatrixDim) throw std::invalid_argument("legendre_matrix dimension exceeds 4096 cap");
  const auto chi = chi_table(f);
  TernaryMatrix out;
  out.entries.resize(f.q, f.q);
  for (std::int64_t i = 0; i < f.q; ++i)
    for (std::int64_t j = 0; j < f.q; ++j) out.entries(i, j) = chi[rank_add(f, i, j)];
  return out;
}

TernaryMatrix w43_base() {
  TernaryMatrix out;
  out.entries.resize(4, 4);
  out.entries << 1, 1, 1, 0,
                 1, -1, 0, 1,
                 1, 0, -1, -1,
                 0, 1, -1, 1;
  out.claimed_weight = 3;
  return out;
}

TernaryMatrix w43_power(int t) {
  if (t < 1) throw std::invalid_argument("t must be positive");
  if (t > 6) throw std::invalid_argument("w43_power dimension exceeds 4096 cap");
  TernaryMatrix out = w43_base();
  for (int i = 1; i < t; ++i) out = tensor(out, w43_base());
  return out;
}

TernaryMatrix identity_matrix(Index n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (n > kMaxMatrixDim) throw std::invalid_argument("matrix dimension exceeds 4096 cap");
  TernaryMatrix out;
  out.entries = IntMatrix::Identity(n, n);
  out.claimed_weight = 1;
  return out;
}

TernaryMatrix parse_matrix(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("matrix file: missing header");
  std::istringstream hs(header);
  long long n = 0, k = 0;
  if (!(hs >> n >> k)) throw std::invalid_argument("matrix file: malformed header");
  std::string extra;
  if (hs >> extra) throw std::invalid_argument("matrix file: malformed header");
  if (n < 1 || n > kMaxMatrixDim) throw std::invalid_argument("matrix file: dimension out of range");
  if (k < -1 || k > n) throw std::invalid_argument("matrix file: weight out of range");

  TernaryMatrix out;
  out.entries.resize(n, n);
  std::string row;
  for (long long i = 0; i < n; ++i) {
    if (!std::getline(in, row)) throw std::invalid_argument("matrix file: missing rows");
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (static_cast<long long>(row.size()) != n)
      throw std::invalid_argument("matrix file: ragged row " + std::to_string(i));
    for (long long j = 0; j < n; ++j) {
      switch (row[j]) {
        case '+': out.entries(i, j) = 1; break;
        case '-': out.entries(i, j) = -1; break;
        case '0': out.entries(i, j) = 0; break;
        default: throw std::invalid_argument("matrix file: non-ternary symbol in row " + std::to_string(i));
      }
    }
  }
  if (std::getline(in, row) && !row.empty())
    throw std::invalid_argument("matrix file: trailing content after rows");

  if (k >= 0) {
    const WeighingCertificate cert = verify_weighing(out);
    if (cert.k != k)
      throw std::runtime_error("matrix file: claimed weight " + std::to_string(k) +
                               " but verification yields " + std::to_string(cert.k));
    out.claimed_weight = static_cast<int>(k);
  }
  return out;
}

std::string serialize_matrix(const TernaryMatrix& m) {
  check_ternary_square(m);
  std::ostringstream out;
  out << m.n() << ' ' << (m.claimed_weight ? *m.claimed_weight : -1) << '\n';
  for (Index i = 0; i < m.n(); ++i) {
    for (Index j = 0; j < m.n(); ++j)
      out << (m.entries(i, j) > 0 ? '+' : m.entries(i, j) < 0 ? '-' : '0');
    out << '\n';
  }
  return out.str();
}

}  // namespace wmq
