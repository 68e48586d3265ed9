#include "wmq/protocols.hpp"

#include <cmath>
#include <random>
#include <set>

#include "doctest.h"

namespace {

using wmq::FieldSpec;
using wmq::RunMode;
using wmq::RunReport;

// Max root-to-leaf edge count, walking the built tree directly.
int walk_depth(const wmq::DecisionTree::Node* node) {
  if (node == nullptr || node->query < 0) return 0;
  int worst = 0;
  for (const auto& c : node->child)
    if (c) worst = std::max(worst, 1 + walk_depth(c.get()));
  return worst;
}

void collect_paths(const wmq::DecisionTree::Node* node, std::set<int>& used, bool& distinct) {
  if (node == nullptr || node->query < 0) return;
  if (used.count(node->query)) distinct = false;
  used.insert(node->query);
  for (const auto& c : node->child)
    if (c) {
      std::set<int> copy = used;
      bool ok = true;
      collect_paths(c.get(), copy, ok);
      if (!ok) distinct = false;
    }
  used.erase(node->query);
}

}  // namespace

TEST_CASE("wm_recover is exact on the w43 base matrix") {
  const auto m = wmq::w43_power(1);
  const RunReport r = wmq::wm_recover(m, 2);
  CHECK(r.recovered_s == 2);
  CHECK(r.success_probability == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.queries_used <= 2);
  CHECK(r.query_budget == 2);
}

TEST_CASE("wm_recover uses one query on full-weight matrices") {
  const auto m = wmq::sylvester(3);
  for (std::int64_t s = 0; s < 8; ++s) {
    const RunReport r = wmq::wm_recover(m, s);
    CHECK(r.recovered_s == s);
    CHECK(r.queries_used == 1);
    CHECK(r.success_probability == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("wm_recover on the identity is an exact search") {
  const auto m = wmq::identity_matrix(4);
  const RunReport r = wmq::wm_recover(m, 3);
  CHECK(r.recovered_s == 3);
  CHECK(r.queries_used <= 3);  // ceil(pi/4 * 2) + 1
  CHECK(r.query_budget == 3);
}

TEST_CASE("wm_recover rejects unverified matrices") {
  wmq::TernaryMatrix m;
  m.entries = wmq::IntMatrix::Identity(4, 4);
  CHECK_THROWS_AS(wmq::wm_recover(m, 0), std::invalid_argument);
}

TEST_CASE("wm_recover sample mode is reproducible") {
  const auto m = wmq::w43_power(1);
  const RunReport a = wmq::wm_recover(m, 1, RunMode::kSample, 99);
  const RunReport b = wmq::wm_recover(m, 1, RunMode::kSample, 99);
  CHECK(a.recovered_s == b.recovered_s);
  CHECK(a.recovered_s == 1);  // distribution is a point mass
  CHECK(*a.seed == 99);
}

TEST_CASE("bv_recover finds every mask with one query") {
  const RunReport two = wmq::bv_recover(2, 0b11);
  CHECK(two.recovered_s == 3);
  CHECK(two.queries_used == 1);
  CHECK(two.success_probability == doctest::Approx(1.0).epsilon(1e-9));

  const RunReport one = wmq::bv_recover(1, 0);
  CHECK(one.recovered_s == 0);
  CHECK(one.queries_used == 1);

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const std::uint64_t mask = rng() % 256;
    const RunReport r = wmq::bv_recover(8, mask);
    CHECK(r.recovered_s == static_cast<std::int64_t>(mask));
    CHECK(r.queries_used == 1);
  }
  CHECK_THROWS_AS(wmq::bv_recover(13, 0), std::invalid_argument);
}

TEST_CASE("bv_recover matches wm_recover on sylvester matrices") {
  for (int bits = 1; bits <= 4; ++bits) {
    const auto m = wmq::sylvester(bits);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bits); ++mask) {
      const RunReport via_bv = wmq::bv_recover(bits, mask);
      const RunReport via_wm = wmq::wm_recover(m, static_cast<std::int64_t>(mask));
      CHECK(via_bv.recovered_s == via_wm.recovered_s);
      CHECK(via_bv.queries_used == via_wm.queries_used);
    }
  }
}

TEST_CASE("sls_quantum recovers the shift on both branches") {
  const FieldSpec f7 = wmq::make_field(7, 1);
  const auto b = wmq::sls_quantum_branches(f7, 4);
  CHECK(b.early_probability == doctest::Approx(1.0 / 8.0).epsilon(1e-9));
  CHECK(b.early_recovered == 4);
  CHECK(b.early_success == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(b.late_recovered == 4);
  CHECK(b.late_success == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(b.filler_probability <= 1e-9);
  CHECK(b.late_queries == 2);

  const FieldSpec f3 = wmq::make_field(3, 1);
  for (std::int64_t s = 0; s < 3; ++s) {
    const RunReport r = wmq::sls_quantum(f3, s);
    CHECK(r.recovered_s == s);
    CHECK(r.queries_used <= 2);
    CHECK(r.success_probability == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.branch_taken == "full");
  }
}

TEST_CASE("sls_quantum works over extension fields") {
  const FieldSpec f9 = wmq::make_field(3, 2);
  for (std::int64_t s = 0; s < 9; ++s) {
    const auto b = wmq::sls_quantum_branches(f9, s);
    CHECK(b.early_probability == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(b.early_recovered == s);
    CHECK(b.late_recovered == s);
    CHECK(b.late_success == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(b.filler_probability <= 1e-9);
  }
}

TEST_CASE("sls_quantum sample mode picks a branch by seed") {
  const FieldSpec f7 = wmq::make_field(7, 1);
  bool saw_early = false, saw_late = false;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const RunReport r = wmq::sls_quantum(f7, 2, RunMode::kSample, seed);
    CHECK(r.recovered_s == 2);
    if (r.branch_taken == "early") {
      CHECK(r.queries_used == 1);
      saw_early = true;
    } else {
      CHECK(r.branch_taken == "late");
      CHECK(r.queries_used == 2);
      saw_late = true;
    }
  }
  CHECK(saw_early);
  CHECK(saw_late);
}

TEST_CASE("sls_classical verifies small fields directly") {
  const FieldSpec f3 = wmq::make_field(3, 1);
  for (std::int64_t s = 0; s < 3; ++s) {
    const RunReport r = wmq::sls_classical(f3, s);
    CHECK(r.recovered_s == s);
    CHECK(r.queries_used <= 2);
  }
}

TEST_CASE("sls_classical stays within budget over F_49") {
  const FieldSpec f = wmq::make_field(7, 2);
  for (std::int64_t s = 0; s < 49; ++s) {
    const RunReport r = wmq::sls_classical(f, s);
    CHECK(r.recovered_s == s);
    CHECK(r.queries_used <= 17);  // ceil(log 49 / log(4/3)) + 3
    CHECK(r.query_budget == 17);
  }
}

TEST_CASE("sls_classical hits the zero answer for the aligned shift") {
  const FieldSpec f9 = wmq::make_field(3, 2);
  bool saw_zero_hit = false;
  for (std::int64_t s = 0; s < 9; ++s) {
    const auto [r, trace] = wmq::sls_classical_traced(f9, s);
    CHECK(r.recovered_s == s);
    if (r.branch_taken == "zero-hit") saw_zero_hit = true;
    for (const auto& round : trace.rounds) {
      if (round.answer == 0) continue;
      CHECK(4 * round.size_after < 3 * round.size_before);
    }
  }
  CHECK(saw_zero_hit);
}

TEST_CASE("classical_bounds evaluates the three formulas") {
  const auto r = wmq::classical_bounds(4, 3, 0.0);
  CHECK(r.bound_log3 == doctest::Approx(std::log(4.0) / std::log(3.0)).epsilon(1e-12));
  CHECK(r.bound_log3 == doctest::Approx(1.2619).epsilon(1e-4));
  CHECK(r.bound_nk == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.bound_log2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.quantum_upper == 2);
  CHECK(r.min_depth == 2);

  for (std::int64_t n : {5, 9, 17}) {
    CHECK(wmq::classical_bounds(n, 1, 0.0).bound_nk ==
          doctest::Approx(static_cast<double>(n - 1)).epsilon(1e-12));
  }
  for (int t = 1; t <= 6; ++t) {
    const std::int64_t n = std::int64_t{1} << t;
    CHECK(wmq::classical_bounds(n, n, 0.0).bound_log2 ==
          doctest::Approx(static_cast<double>(t)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(wmq::classical_bounds(4, 5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(wmq::classical_bounds(4, 3, 1.0), std::invalid_argument);
}

TEST_CASE("sls_bounds records statement and proof forms") {
  const auto r = wmq::sls_bounds(7, 0.0);
  CHECK(r.bound_statement == doctest::Approx(std::log2(7.0) - 1.0).epsilon(1e-12));
  CHECK(r.bound_proof_form == doctest::Approx(std::log2(8.0) - 1.0).epsilon(1e-12));
  CHECK(r.quantum_upper == 2);
  CHECK(r.min_depth == 2);  // proof form: 2^(d+1) - 1 >= 7 needs d >= 2
  CHECK(r.classical_upper ==
        static_cast<std::int64_t>(std::ceil(std::log(7.0) / std::log(4.0 / 3.0))) + 3);
}

TEST_CASE("tensor_family reproduces the w43 exponent") {
  const auto rows = wmq::tensor_family(4, 3, 3, 0.0);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) CHECK(std::abs(row.gamma - 0.2075) <= 0.0005);
  CHECK(rows[1].big_n == 16);
  CHECK(rows[1].big_k == 9);
  CHECK(rows[1].quantum == 3);  // ceil(pi/4 * 4/3) + 1
  CHECK(rows[2].big_n == 64);
  CHECK(rows[2].big_k == 27);
  CHECK(rows[2].quantum == 3);

  const auto flat = wmq::tensor_family(2, 2, 5, 0.0);
  for (const auto& row : flat) {
    CHECK(row.gamma == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(row.quantum == 2);
  }
  CHECK_THROWS_AS(wmq::tensor_family(4, 3, 7, 0.0), std::invalid_argument);
}

TEST_CASE("optimal_tree on identity families needs n - 1 queries") {
  for (wmq::Index n = 3; n <= 6; ++n) {
    const auto family = wmq::matrix_rows_family(wmq::identity_matrix(n));
    const auto tree = wmq::optimal_tree(family);
    CHECK(tree.depth == n - 1);
    CHECK(walk_depth(tree.root.get()) == tree.depth);
    for (std::size_t c = 0; c < family.size(); ++c)
      CHECK(wmq::tree_classify(tree, family[c]) == static_cast<int>(c));
  }
}

TEST_CASE("optimal_tree separates small shifted-character families quickly") {
  const FieldSpec f3 = wmq::make_field(3, 1);
  const auto tree3 = wmq::optimal_tree(wmq::sls_family(f3));
  CHECK(tree3.depth == 1);  // one query yields three distinct answers

  const FieldSpec f7 = wmq::make_field(7, 1);
  const auto family7 = wmq::sls_family(f7);
  const auto tree7 = wmq::optimal_tree(family7);
  CHECK((std::int64_t{1} << (tree7.depth + 1)) - 1 >= 7);
  for (std::size_t s = 0; s < family7.size(); ++s)
    CHECK(wmq::tree_classify(tree7, family7[s]) == static_cast<int>(s));
}

TEST_CASE("optimal_tree depth for the w43 rows is two") {
  const auto family = wmq::matrix_rows_family(wmq::w43_power(1));
  const auto tree = wmq::optimal_tree(family);
  CHECK(tree.depth == 2);  // >= ceil(log3 4), and a 2-deep split exists
  bool distinct = true;
  std::set<int> used;
  collect_paths(tree.root.get(), used, distinct);
  CHECK(distinct);
}

TEST_CASE("optimal_tree depth for sylvester rows equals the bit count") {
  for (int t = 1; t <= 3; ++t) {
    const auto family = wmq::matrix_rows_family(wmq::sylvester(t));
    const auto tree = wmq::optimal_tree(family);
    CHECK(tree.depth == t);
  }
}

TEST_CASE("optimal_tree depth dominates all three lower bounds") {
  const std::vector<wmq::TernaryMatrix> pool = {wmq::identity_matrix(5), wmq::w43_power(1),
                                                wmq::sylvester(2), wmq::sylvester(3),
                                                wmq::paley_one(7)};
  for (const auto& m : pool) {
    const auto tree = wmq::optimal_tree(wmq::matrix_rows_family(m));
    const auto b = wmq::classical_bounds(m.n(), *m.claimed_weight, 0.0);
    CHECK(tree.depth >= b.min_depth);
    CHECK(static_cast<double>(tree.depth) >= b.bound_log3 - 1e-9);
    CHECK(static_cast<double>(tree.depth) >= b.bound_nk - 1e-9);
    CHECK(static_cast<double>(tree.depth) >= b.bound_log2 - 1e-9);
  }
}

TEST_CASE("optimal_tree input validation") {
  CHECK_THROWS_AS(wmq::optimal_tree({}), std::invalid_argument);
  CHECK_THROWS_AS(wmq::optimal_tree({{1, 0}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(wmq::optimal_tree({{1}, {0}}, 1), std::invalid_argument);
  std::vector<std::vector<int>> too_big(17, std::vector<int>(17, 0));
  CHECK_THROWS_AS(wmq::optimal_tree(too_big), std::invalid_argument);
}

TEST_CASE("reports serialize with the documented keys") {
  const RunReport r = wmq::wm_recover(wmq::w43_power(1), 0);
  const nlohmann::ordered_json j = r;
  const std::vector<std::string> expected = {"protocol",     "parameters",
                                             "hidden_s",     "recovered_s",
                                             "queries_used", "query_budget",
                                             "success_probability", "branch_taken"};
  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  CHECK(keys == expected);
  CHECK(j["parameters"].size() == 2);

  const nlohmann::ordered_json sampled = wmq::sls_quantum(wmq::make_field(3, 1), 1,
                                                          RunMode::kSample, 5);
  CHECK(sampled.contains("seed"));

  const nlohmann::ordered_json b = wmq::classical_bounds(4, 3, 0.0);
  std::vector<std::string> bkeys;
  for (const auto& item : b.items()) bkeys.push_back(item.key());
  CHECK(bkeys == std::vector<std::string>{"n", "k", "eps", "bound_log3", "bound_nk", "bound_log2",
                                          "quantum_upper", "min_depth"});
}
