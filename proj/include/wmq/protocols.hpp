#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wmq/designs.hpp"
#include "wmq/field.hpp"
#include "wmq/qsim.hpp"

namespace wmq {

enum class RunMode { kFull, kSample };

/// Outcome record of one protocol execution. queries_used never exceeds
/// query_budget; construction enforces it.
struct RunReport {
  std::string protocol;
  std::map<std::string, std::int64_t> parameters;  // n, k, q, t as applicable
  std::int64_t hidden_s = 0;
  std::int64_t recovered_s = 0;
  std::uint64_t queries_used = 0;
  std::uint64_t query_budget = 0;
  double success_probability = 0.0;
  std::string branch_taken;
  std::optional<std::uint64_t> seed;
};

void to_json(nlohmann::ordered_json& j, const RunReport& r);

/// The three decision-tree lower bounds for recovering a row of a W(n, k)
/// matrix with error probability at most eps, next to the quantum budget.
struct BoundsReport {
  std::int64_t n = 0;
  std::int64_t k = 0;
  double eps = 0.0;
  double bound_log3 = 0.0;   // log3(n) + log3(1 - eps)
  double bound_nk = 0.0;     // (1 - eps) n/k - 1/k
  double bound_log2 = 0.0;   // log2(n / (n - k + 1)) + log2(1 - eps)
  std::int64_t quantum_upper = 0;
  std::int64_t min_depth = 0;
};

void to_json(nlohmann::ordered_json& j, const BoundsReport& r);

/// Classical lower bounds for the shifted-sequence problem over F_q, in both
/// circulating forms; depth certification uses the proof form
/// 2^(d+1) - 1 >= (1 - eps) q.
struct SlsBoundsReport {
  std::int64_t q = 0;
  double eps = 0.0;
  double bound_statement = 0.0;   // log2 q + log2((1 - eps) / 2)
  double bound_proof_form = 0.0;  // log2((1 - eps) q + 1) - 1
  std::int64_t quantum_upper = 2;
  std::int64_t classical_upper = 0;  // ceil(log q / log(4/3)) + 3
  std::int64_t min_depth = 0;
};

void to_json(nlohmann::ordered_json& j, const SlsBoundsReport& r);

/// Ternary decision tree: inner nodes query an index, children follow the
/// answers -1 / 0 / +1, leaves guess the family member. Along any root-leaf
/// path query indices are distinct.
struct DecisionTree {
  struct Node {
    int query = -1;  // -1 marks a leaf
    int guess = -1;  // family index, leaves only
    std::array<std::unique_ptr<Node>, 3> child;  // answers -1, 0, +1
  };
  std::unique_ptr<Node> root;
  int depth = 0;
};

/// Minimum worst-case-depth tree that identifies every family member exactly,
/// by memoized minimax over candidate subsets; ties break toward the smallest
/// query index. Family size is capped (16 by default).
DecisionTree optimal_tree(const std::vector<std::vector<int>>& family, int family_cap = 16);

/// Walks a function table through the tree; returns the leaf guess.
int tree_classify(const DecisionTree& tree, const std::vector<int>& table);

/// Rows of a ternary matrix as oracle tables.
std::vector<std::vector<int>> matrix_rows_family(const TernaryMatrix& m);

/// The q shifted-character tables f_s(i) = chi(i + s) in rank order.
std::vector<std::vector<int>> sls_family(const FieldSpec& f);

/// Recovers the hidden row index of a verified weighing matrix: signed-state
/// preparation then a measurement in the basis of scaled rows. Exact, with at
/// most ceil(pi/4 sqrt(n/k)) + 1 queries (one query when k = n).
RunReport wm_recover(const TernaryMatrix& m, std::int64_t hidden_s, RunMode mode = RunMode::kFull,
                     std::uint64_t seed = 0);

/// Recovers an n-bit mask from the +-1 parity oracle with a single kickback
/// between Hadamard layers; one query, exact.
RunReport bv_recover(int n_bits, std::uint64_t mask);

/// Per-branch record of the two-query shifted-character protocol.
struct SlsQuantumBranches {
  double early_probability = 0.0;        // chance the answer register reads 0
  std::int64_t early_recovered = 0;
  double early_success = 0.0;            // prob the early readout names the shift
  std::int64_t late_recovered = 0;
  double late_success = 0.0;             // prob of the correct basis outcome
  double filler_probability = 0.0;       // prob of the orthogonal filler vector
  std::uint64_t early_queries = 1;
  std::uint64_t late_queries = 2;
};

SlsQuantumBranches sls_quantum_branches(const FieldSpec& f, std::int64_t hidden_s);

/// Recovers the shift s of f_s(i) = chi(i + s) with at most two quantum
/// queries. Full mode traverses both measurement branches; sample mode picks
/// one with the seeded generator.
RunReport sls_quantum(const FieldSpec& f, std::int64_t hidden_s, RunMode mode = RunMode::kFull,
                      std::uint64_t seed = 0);

struct SlsRound {
  std::int64_t query_index = 0;
  int answer = 0;
  std::size_t size_before = 0;
  std::size_t size_after = 0;
};

struct SlsClassicalTrace {
  std::vector<SlsRound> rounds;
  std::vector<std::int64_t> endgame_queries;
};

/// Deterministic halving solver: repeatedly queries the index that best
/// balances the surviving candidate set (each round shrinks it below 3/4),
/// then verifies the last few candidates at their zero positions. At most
/// ceil(log q / log(4/3)) + 3 queries.
RunReport sls_classical(const FieldSpec& f, std::int64_t hidden_s);
std::pair<RunReport, SlsClassicalTrace> sls_classical_traced(const FieldSpec& f,
                                                             std::int64_t hidden_s);

BoundsReport classical_bounds(std::int64_t n, std::int64_t k, double eps);
SlsBoundsReport sls_bounds(std::int64_t q, double eps);

/// One row per tensor power of a base W(n, k): problem size N = n^t, weight
/// K = k^t, exponent gamma = 1 - log_n k, quantum budget and classical lower
/// bound at that size.
struct FamilyRow {
  int t = 0;
  std::int64_t big_n = 0;
  std::int64_t big_k = 0;
  double gamma = 0.0;
  std::int64_t quantum = 0;
  double classical_lower = 0.0;
};

std::vector<FamilyRow> tensor_family(std::int64_t n, std::int64_t k, int t_max, double eps);

}  // namespace wmq
