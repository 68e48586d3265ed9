#include "wmq/designs.hpp"

#include <random>

#include "doctest.h"

namespace {

using wmq::TernaryMatrix;

std::pair<std::int64_t, std::int64_t> split_prime_power(std::int64_t q) {
  for (std::int64_t p = 3; p * p <= q; p += 2) {
    if (q % p == 0) {
      std::int64_t k = 0;
      while (q % p == 0) {
        q /= p;
        ++k;
      }
      return {p, k};
    }
  }
  return {q, 1};
}

}  // namespace

TEST_CASE("verify_weighing certifies identity and w43") {
  const auto id5 = wmq::identity_matrix(5);
  const auto cert = wmq::verify_weighing(id5);
  CHECK(cert.k == 1);
  CHECK(cert.n == 5);
  CHECK_FALSE(cert.hadamard);
  for (int i = 0; i < 5; ++i) {
    CHECK(cert.row_nonzeros(i) == 1);
    CHECK(cert.col_nonzeros(i) == 1);
  }

  TernaryMatrix w43;
  w43.entries.resize(4, 4);
  w43.entries << 1, 1, 1, 0,
                 1, -1, 0, 1,
                 1, 0, -1, -1,
                 0, 1, -1, 1;
  const auto c43 = wmq::verify_weighing(w43);
  CHECK(c43.k == 3);
  CHECK(w43.entries == wmq::w43_base().entries);
}

TEST_CASE("verify_weighing rejects non-orthogonal rows") {
  TernaryMatrix ones;
  ones.entries = wmq::IntMatrix::Ones(2, 2);
  CHECK_THROWS_AS(wmq::verify_weighing(ones), wmq::NotWeighingError);
  try {
    wmq::verify_weighing(ones);
  } catch (const wmq::NotWeighingError& e) {
    CHECK(e.row_a() == 0);
    CHECK(e.row_b() == 1);
    CHECK(e.value() == 2);
  }

  TernaryMatrix bad;
  bad.entries.resize(2, 2);
  bad.entries << 1, 0, 0, 2;
  CHECK_THROWS_AS(wmq::verify_weighing(bad), std::invalid_argument);
}

TEST_CASE("tensor multiplies weights") {
  const auto i2 = wmq::identity_matrix(2);
  const auto i4 = wmq::tensor(i2, i2);
  CHECK(i4.entries == wmq::IntMatrix::Identity(4, 4));
  CHECK(*i4.claimed_weight == 1);

  const auto w = wmq::w43_base();
  const auto w2 = wmq::tensor(w, w);
  const auto cert = wmq::verify_weighing(w2);
  CHECK(cert.n == 16);
  CHECK(cert.k == 9);

  const auto s1 = wmq::sylvester(1);
  const auto s2 = wmq::tensor(s1, s1);
  CHECK(wmq::verify_weighing(s2).k == 4);
  CHECK(s2.entries == wmq::sylvester(2).entries);

  TernaryMatrix unverified;
  unverified.entries = wmq::IntMatrix::Identity(2, 2);
  CHECK_THROWS_AS(wmq::tensor(unverified, i2), std::invalid_argument);
}

TEST_CASE("tensor weight is the product of the factors' weights") {
  const std::vector<TernaryMatrix> pool = {wmq::identity_matrix(3), wmq::w43_base(),
                                           wmq::sylvester(2), wmq::paley_one(3)};
  for (const auto& a : pool) {
    for (const auto& b : pool) {
      const auto t = wmq::tensor(a, b);
      CHECK(wmq::verify_weighing(t).k ==
            wmq::verify_weighing(a).k * wmq::verify_weighing(b).k);
    }
  }
}

TEST_CASE("sylvester construction") {
  const auto s1 = wmq::sylvester(1);
  wmq::IntMatrix expect1(2, 2);
  expect1 << 1, 1, 1, -1;
  CHECK(s1.entries == expect1);
  CHECK(*s1.claimed_weight == 2);

  const auto s2 = wmq::sylvester(2);
  wmq::IntMatrix expect2(4, 4);
  expect2 << 1, 1, 1, 1,
             1, -1, 1, -1,
             1, 1, -1, -1,
             1, -1, -1, 1;
  CHECK(s2.entries == expect2);

  CHECK(wmq::verify_weighing(wmq::sylvester(3)).k == 8);
  CHECK_THROWS_AS(wmq::sylvester(13), std::invalid_argument);
}

TEST_CASE("paley constructions certify as Hadamard") {
  for (std::int64_t q : {3, 7, 11, 19, 23, 27}) {
    const auto h = wmq::paley_one(q);
    const auto cert = wmq::verify_weighing(h);
    CHECK(cert.n == q + 1);
    CHECK(cert.k == q + 1);
    CHECK(cert.hadamard);
  }
  for (std::int64_t q : {5, 9, 13, 25}) {
    const auto h = wmq::paley_two(q);
    const auto cert = wmq::verify_weighing(h);
    CHECK(cert.n == 2 * q + 2);
    CHECK(cert.k == 2 * q + 2);
    CHECK(cert.hadamard);
  }
  // every row and column of a verified matrix has exactly k nonzero entries
  for (const auto& m : {wmq::paley_one(7), wmq::w43_power(2), wmq::sylvester(3)}) {
    const auto cert = wmq::verify_weighing(m);
    for (wmq::Index i = 0; i < cert.n; ++i) {
      CHECK(cert.row_nonzeros(i) == cert.k);
      CHECK(cert.col_nonzeros(i) == cert.k);
    }
  }
  CHECK_THROWS_AS(wmq::paley_one(5), std::invalid_argument);
  CHECK_THROWS_AS(wmq::paley_two(7), std::invalid_argument);
  CHECK_THROWS_AS(wmq::paley_one(15), std::invalid_argument);
  CHECK_THROWS_AS(wmq::paley_two(21), std::invalid_argument);
}

TEST_CASE("legendre matrix satisfies L^T L = qI - J") {
  const auto f3 = wmq::make_field(3, 1);
  const auto l3 = wmq::legendre_matrix(f3);
  wmq::IntMatrix expect(3, 3);
  expect << 0, 1, -1,
            1, -1, 0,
            -1, 0, 1;
  CHECK(l3.entries == expect);

  for (std::int64_t q : {3LL, 7LL, 9LL, 25LL, 27LL, 49LL}) {
    auto [p, k] = split_prime_power(q);
    const auto f = wmq::make_field(p, k);
    const auto l = wmq::legendre_matrix(f);
    const wmq::IntMatrix gram = l.entries.transpose() * l.entries;
    for (wmq::Index i = 0; i < q; ++i)
      for (wmq::Index j = 0; j < q; ++j)
        CHECK(gram(i, j) == (i == j ? q - 1 : -1));
  }
}

TEST_CASE("w43 powers") {
  CHECK(wmq::w43_power(1).entries == wmq::w43_base().entries);
  const auto w2 = wmq::w43_power(2);
  CHECK(w2.n() == 16);
  CHECK(wmq::verify_weighing(w2).k == 9);
  const auto w3 = wmq::w43_power(3);
  CHECK(w3.n() == 64);
  CHECK(wmq::verify_weighing(w3).k == 27);
}

TEST_CASE("matrix file format") {
  const auto s1 = wmq::parse_matrix("2 2\n++\n+-\n");
  CHECK(s1.entries == wmq::sylvester(1).entries);
  CHECK(*s1.claimed_weight == 2);

  const auto w43 = wmq::parse_matrix("4 3\n+++0\n+-0+\n+0--\n0+-+\n");
  CHECK(w43.entries == wmq::w43_base().entries);

  CHECK_THROWS_AS(wmq::parse_matrix("2 2\n+x\n++\n"), std::invalid_argument);
  CHECK_THROWS_AS(wmq::parse_matrix("2 2\n++\n+\n"), std::invalid_argument);
  CHECK_THROWS_AS(wmq::parse_matrix("two 2\n++\n+-\n"), std::invalid_argument);
  CHECK_THROWS_AS(wmq::parse_matrix("2\n++\n+-\n"), std::invalid_argument);
  CHECK_THROWS_AS(wmq::parse_matrix("2 2\n++\n"), std::invalid_argument);
  // claimed weight that fails verification
  CHECK_THROWS(wmq::parse_matrix("2 2\n++\n++\n"));
  // unverified matrices parse fine
  const auto free = wmq::parse_matrix("2 -1\n++\n++\n");
  CHECK_FALSE(free.claimed_weight.has_value());
}

TEST_CASE("serialize round trip") {
  for (const auto& m : {wmq::sylvester(2), wmq::w43_base(), wmq::identity_matrix(5),
                        wmq::paley_one(7), wmq::legendre_matrix(wmq::make_field(5, 1))}) {
    const std::string text = wmq::serialize_matrix(m);
    const auto back = wmq::parse_matrix(text);
    CHECK(back.entries == m.entries);
    CHECK(back.claimed_weight == m.claimed_weight);
    CHECK(wmq::serialize_matrix(back) == text);
  }
}

TEST_CASE("certify stamps a verified weight") {
  auto m = wmq::parse_matrix("2 -1\n++\n+-\n");
  CHECK_FALSE(m.claimed_weight.has_value());
  m = wmq::certify(std::move(m));
  CHECK(*m.claimed_weight == 2);
}
