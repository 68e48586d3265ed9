#include "wmq/protocols.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace wmq {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Smallest integer d with d >= x, guarded against float fuzz on exact hits.
std::int64_t ceil_bound(double x) {
  if (x <= 0.0) return 0;
  return static_cast<std::int64_t>(std::ceil(x - 1e-9));
}

std::uint64_t wm_budget(Index n, Index k) {
  if (k == n) return 1;
  return static_cast<std::uint64_t>(
             std::ceil(kPi / 4.0 * std::sqrt(static_cast<double>(n) / static_cast<double>(k)))) +
         1;
}

RunReport finish_report(RunReport r) {
  if (r.queries_used > r.query_budget)
    throw std::runtime_error(r.protocol + ": query budget exceeded (" +
                             std::to_string(r.queries_used) + " > " +
                             std::to_string(r.query_budget) + ")");
  return r;
}

Index argmax(const std::vector<double>& v) {
  return static_cast<Index>(std::max_element(v.begin(), v.end()) - v.begin());
}

double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void to_json(nlohmann::ordered_json& j, const RunReport& r) {
  j = nlohmann::ordered_json{{"protocol", r.protocol},
                             {"parameters", r.parameters},
                             {"hidden_s", r.hidden_s},
                             {"recovered_s", r.recovered_s},
                             {"queries_used", r.queries_used},
                             {"query_budget", r.query_budget},
                             {"success_probability", r.success_probability},
                             {"branch_taken", r.branch_taken}};
  if (r.seed) j["seed"] = *r.seed;
}

void to_json(nlohmann::ordered_json& j, const BoundsReport& r) {
  j = nlohmann::ordered_json{{"n", r.n},
                             {"k", r.k},
                             {"eps", r.eps},
                             {"bound_log3", r.bound_log3},
                             {"bound_nk", r.bound_nk},
                             {"bound_log2", r.bound_log2},
                             {"quantum_upper", r.quantum_upper},
                             {"min_depth", r.min_depth}};
}

void to_json(nlohmann::ordered_json& j, const SlsBoundsReport& r) {
  j = nlohmann::ordered_json{{"q", r.q},
                             {"eps", r.eps},
                             {"bound_statement", r.bound_statement},
                             {"bound_proof_form", r.bound_proof_form},
                             {"quantum_upper", r.quantum_upper},
                             {"classical_upper", r.classical_upper},
                             {"min_depth", r.min_depth}};
}

std::vector<std::vector<int>> matrix_rows_family(const TernaryMatrix& m) {
  std::vector<std::vector<int>> family(static_cast<std::size_t>(m.n()));
  for (Index i = 0; i < m.n(); ++i) {
    family[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(m.n()));
    for (Index j = 0; j < m.n(); ++j)
      family[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m.entries(i, j);
  }
  return family;
}

std::vector<std::vector<int>> sls_family(const FieldSpec& f) {
  const auto chi = chi_table(f);
  std::vector<std::vector<int>> family(static_cast<std::size_t>(f.q));
  for (std::int64_t s = 0; s < f.q; ++s) {
    family[static_cast<std::size_t>(s)].resize(static_cast<std::size_t>(f.q));
    for (std::int64_t i = 0; i < f.q; ++i)
      family[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] =
          chi[static_cast<std::size_t>(rank_add(f, i, s))];
  }
  return family;
}

RunReport wm_recover(const TernaryMatrix& m, std::int64_t hidden_s, RunMode mode,
                     std::uint64_t seed) {
  if (!m.claimed_weight) throw std::invalid_argument("wm_recover requires a verified weighing matrix");
  const Index n = m.n();
  const Index k = *m.claimed_weight;
  if (k < 1) throw std::invalid_argument("wm_recover requires weight k >= 1");
  if (hidden_s < 0 || hidden_s >= n) throw std::invalid_argument("hidden row index out of range");

  std::vector<int> table(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) table[static_cast<std::size_t>(j)] = m.entries(hidden_s, j);
  QueryOracle oracle(std::move(table));

  const Prepared prep = construct_signed_state(oracle, n, k);

  // Rows of M, scaled to unit length, as the measurement basis. The integer
  // certificate M M^T = k I already implies orthonormality exactly, so the
  // float re-check of the factory is skipped.
  const MeasurementBasis basis{
      (m.entries.cast<double>().transpose() / std::sqrt(static_cast<double>(k))).cast<Complex>()};
  const std::vector<double> dist = basis_distribution(prep.state, basis);

  RunReport r;
  r.protocol = "wm";
  r.parameters = {{"n", n}, {"k", k}};
  r.hidden_s = hidden_s;
  r.success_probability = dist[static_cast<std::size_t>(hidden_s)];
  r.queries_used = oracle.queries();
  r.query_budget = wm_budget(n, k);
  r.branch_taken = "deterministic";
  if (mode == RunMode::kSample) {
    r.recovered_s = measure_in_basis(prep.state, basis, SampleMode{seed}).index;
    r.seed = seed;
  } else {
    r.recovered_s = argmax(dist);
  }
  return finish_report(std::move(r));
}

RunReport bv_recover(int n_bits, std::uint64_t mask) {
  if (n_bits < 1 || n_bits > 12) throw std::invalid_argument("n_bits must be in [1, 12]");
  const Index n = Index{1} << n_bits;
  if (mask >= static_cast<std::uint64_t>(n)) throw std::invalid_argument("mask out of range");

  std::vector<int> table(static_cast<std::size_t>(n));
  for (Index x = 0; x < n; ++x)
    table[static_cast<std::size_t>(x)] =
        std::popcount(static_cast<std::uint64_t>(x) & mask) % 2 ? -1 : 1;
  QueryOracle oracle(std::move(table));

  CMatrix h(2, 2);
  const double r2 = 1.0 / std::sqrt(2.0);
  h << Complex(r2, 0), Complex(r2, 0), Complex(r2, 0), Complex(-r2, 0);

  StateVector sv = basis_state(std::vector<Index>(static_cast<std::size_t>(n_bits), 2),
                               std::vector<Index>(static_cast<std::size_t>(n_bits), 0));
  for (int j = 0; j < n_bits; ++j) sv = apply_unitary(sv, h, j);
  sv = kickback(sv, oracle);
  for (int j = 0; j < n_bits; ++j) sv = apply_unitary(sv, h, j);

  // Joint computational readout: the flat index is the measured mask.
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (Index x = 0; x < n; ++x) dist[static_cast<std::size_t>(x)] = std::norm(sv.amps(x));

  RunReport r;
  r.protocol = "bv";
  r.parameters = {{"n", n_bits}};
  r.hidden_s = static_cast<std::int64_t>(mask);
  r.recovered_s = argmax(dist);
  r.success_probability = dist[static_cast<std::size_t>(mask)];
  r.queries_used = oracle.queries();
  r.query_budget = 1;
  r.branch_taken = "deterministic";
  return finish_report(std::move(r));
}

namespace {

// Columns chi(i + s)/sqrt(q) with a 1/sqrt(q) dummy entry, one per shift,
// completed by a Gram-Schmidt filler vector orthogonal to all of them.
MeasurementBasis shifted_character_basis(const FieldSpec& f, const std::vector<int>& chi) {
  const Index q = f.q;
  CMatrix cols(q + 1, q + 1);
  const double scale = 1.0 / std::sqrt(static_cast<double>(q));
  for (Index s = 0; s < q; ++s) {
    for (Index i = 0; i < q; ++i)
      cols(i, s) = Complex(scale * chi[static_cast<std::size_t>(rank_add(f, i, s))], 0.0);
    cols(q, s) = Complex(scale, 0.0);
  }
  CVector filler = CVector::Zero(q + 1);
  filler(0) = Complex(1.0, 0.0);
  for (Index s = 0; s < q; ++s) filler -= (cols.col(s).adjoint() * filler)(0, 0) * cols.col(s);
  filler /= std::sqrt(filler.squaredNorm());
  cols.col(q) = filler;
  return MeasurementBasis::from_columns(std::move(cols));
}

}  // namespace

SlsQuantumBranches sls_quantum_branches(const FieldSpec& f, std::int64_t hidden_s) {
  if (f.q > (std::int64_t{1} << 11)) throw std::invalid_argument("sls_quantum capped at q <= 2^11");
  if (hidden_s < 0 || hidden_s >= f.q) throw std::invalid_argument("hidden shift out of range");
  const Index q = f.q;
  const auto chi = chi_table(f);

  std::vector<int> table(static_cast<std::size_t>(q));
  for (Index i = 0; i < q; ++i)
    table[static_cast<std::size_t>(i)] = chi[static_cast<std::size_t>(rank_add(f, i, hidden_s))];
  QueryOracle oracle(std::move(table));

  // 1/sqrt(q+1) (sum_i |i>|0> + |dummy>|1>), dummy = main value q.
  StateVector sv;
  sv.dims = {q + 1, 4};
  sv.amps = CVector::Zero((q + 1) * 4);
  const double init = 1.0 / std::sqrt(static_cast<double>(q + 1));
  for (Index i = 0; i < q; ++i) sv.amps(i * 4 + 0) = init;
  sv.amps(q * 4 + 1) = init;

  sv = oracle_xor4(sv, oracle, 0, 1);  // query 1

  SlsQuantumBranches out;

  // Early branch: the answer register reads 0, revealing -s directly.
  const Projection early = project_register_equal(sv, 1, 0);
  out.early_probability = early.probability;
  const std::vector<double> early_dist = register_distribution(early.state, 0);
  const Index early_main = argmax(early_dist);
  out.early_recovered = rank_neg(f, early_main);
  out.early_success = early_dist[static_cast<std::size_t>(early_main)];
  out.early_queries = 1;

  // Late branch: phase the -1 answers, erase the answer register with the
  // inverse oracle call, reset the dummy, measure in the shifted basis.
  Projection late = project_register_not_equal(sv, 1, 0);
  CMatrix phase3 = CMatrix::Identity(4, 4);
  phase3(3, 3) = Complex(-1.0, 0.0);
  late.state = apply_unitary(late.state, phase3, 1);
  late.state = oracle_xor4_inverse(late.state, oracle, 0, 1);  // query 2
  // Dummy answer reset |1> -> |0>: a fixed two-level swap on the dummy block,
  // independent of the oracle.
  std::swap(late.state.amps(q * 4 + 0), late.state.amps(q * 4 + 1));

  CVector answer_zero = CVector::Zero(4);
  answer_zero(0) = Complex(1.0, 0.0);
  const StateVector main_only = detach_register(late.state, 1, answer_zero);

  const MeasurementBasis basis = shifted_character_basis(f, chi);
  const std::vector<double> dist = basis_distribution(main_only, basis);
  const Index late_outcome = argmax(dist);
  out.late_recovered = late_outcome;
  out.late_success = dist[static_cast<std::size_t>(hidden_s)];
  out.filler_probability = dist[static_cast<std::size_t>(q)];
  out.late_queries = oracle.queries();
  return out;
}

RunReport sls_quantum(const FieldSpec& f, std::int64_t hidden_s, RunMode mode,
                      std::uint64_t seed) {
  const SlsQuantumBranches b = sls_quantum_branches(f, hidden_s);
  const double total_success = b.early_probability * b.early_success +
                               (1.0 - b.early_probability) * b.late_success;

  RunReport r;
  r.protocol = "sls-quantum";
  r.parameters = {{"q", f.q}};
  r.hidden_s = hidden_s;
  r.query_budget = 2;
  r.success_probability = total_success;
  if (mode == RunMode::kSample) {
    std::mt19937_64 rng(seed);
    const bool take_early = next_uniform(rng) < b.early_probability;
    r.branch_taken = take_early ? "early" : "late";
    r.recovered_s = take_early ? b.early_recovered : b.late_recovered;
    r.queries_used = take_early ? b.early_queries : b.late_queries;
    r.seed = seed;
  } else {
    if (b.early_recovered != b.late_recovered)
      throw std::runtime_error("sls_quantum branches disagree on the shift");
    r.branch_taken = "full";
    r.recovered_s = b.late_recovered;
    r.queries_used = std::max(b.early_queries, b.late_queries);
  }
  return finish_report(std::move(r));
}

std::pair<RunReport, SlsClassicalTrace> sls_classical_traced(const FieldSpec& f,
                                                             std::int64_t hidden_s) {
  if (f.q > (std::int64_t{1} << 16)) throw std::invalid_argument("sls_classical capped at q <= 2^16");
  if (hidden_s < 0 || hidden_s >= f.q) throw std::invalid_argument("hidden shift out of range");
  const std::int64_t q = f.q;
  const auto chi = chi_table(f);

  std::vector<int> table(static_cast<std::size_t>(q));
  for (std::int64_t i = 0; i < q; ++i)
    table[static_cast<std::size_t>(i)] = chi[static_cast<std::size_t>(rank_add(f, i, hidden_s))];
  QueryOracle oracle(std::move(table));

  SlsClassicalTrace trace;
  std::vector<std::int64_t> candidates(static_cast<std::size_t>(q));
  for (std::int64_t c = 0; c < q; ++c) candidates[static_cast<std::size_t>(c)] = c;

  std::optional<std::int64_t> recovered;
  std::string branch;

  while (candidates.size() >= 4) {
    // Smallest index minimizing max(|S+|, |S-|) over the candidates' predicted
    // answers. No index can beat ceil((|S|-1)/2), so stop once that is hit.
    const std::size_t floor_target = candidates.size() / 2;
    std::int64_t best_i = -1;
    std::size_t best_max = candidates.size() + 1;
    for (std::int64_t i = 0; i < q; ++i) {
      std::size_t plus = 0, minus = 0;
      for (std::int64_t c : candidates) {
        const int predicted = chi[static_cast<std::size_t>(rank_add(f, i, c))];
        plus += predicted == 1;
        minus += predicted == -1;
      }
      const std::size_t worst = std::max(plus, minus);
      if (worst < best_max) {
        best_max = worst;
        best_i = i;
        if (worst <= floor_target) break;
      }
    }

    const int answer = oracle.classical_query(best_i);
    if (answer == 0) {
      recovered = rank_neg(f, best_i);
      branch = "zero-hit";
      trace.rounds.push_back(SlsRound{best_i, answer, candidates.size(), 1});
      break;
    }
    std::vector<std::int64_t> next;
    for (std::int64_t c : candidates)
      if (chi[static_cast<std::size_t>(rank_add(f, best_i, c))] == answer) next.push_back(c);
    if (4 * next.size() >= 3 * candidates.size())
      throw std::runtime_error("candidate set failed to shrink below 3/4");
    trace.rounds.push_back(SlsRound{best_i, answer, candidates.size(), next.size()});
    candidates = std::move(next);
  }

  if (!recovered) {
    // Verify survivors at their zero positions: chi(s + (-c)) = 0 iff c = s.
    for (std::size_t idx = 0; idx + 1 < candidates.size(); ++idx) {
      const std::int64_t probe = rank_neg(f, candidates[idx]);
      trace.endgame_queries.push_back(probe);
      if (oracle.classical_query(probe) == 0) {
        recovered = candidates[idx];
        branch = "verified";
        break;
      }
    }
    if (!recovered) {
      recovered = candidates.back();
      branch = "eliminated";
    }
  }

  RunReport r;
  r.protocol = "sls-classical";
  r.parameters = {{"q", q}};
  r.hidden_s = hidden_s;
  r.recovered_s = *recovered;
  r.queries_used = oracle.queries();
  r.query_budget = static_cast<std::uint64_t>(
                       std::ceil(std::log(static_cast<double>(q)) / std::log(4.0 / 3.0))) +
                   3;
  r.success_probability = *recovered == hidden_s ? 1.0 : 0.0;
  r.branch_taken = branch;
  return {finish_report(std::move(r)), std::move(trace)};
}

RunReport sls_classical(const FieldSpec& f, std::int64_t hidden_s) {
  return sls_classical_traced(f, hidden_s).first;
}

BoundsReport classical_bounds(std::int64_t n, std::int64_t k, double eps) {
  if (k < 1 || k > n) throw std::invalid_argument("need 1 <= k <= n");
  if (eps < 0.0 || eps >= 1.0) throw std::invalid_argument("need 0 <= eps < 1");
  BoundsReport r;
  r.n = n;
  r.k = k;
  r.eps = eps;
  r.bound_log3 = (std::log(static_cast<double>(n)) + std::log1p(-eps)) / std::log(3.0);
  r.bound_nk = (1.0 - eps) * static_cast<double>(n) / static_cast<double>(k) -
               1.0 / static_cast<double>(k);
  r.bound_log2 = std::log2(static_cast<double>(n) / static_cast<double>(n - k + 1)) +
                 std::log2(1.0 - eps);
  r.quantum_upper = static_cast<std::int64_t>(std::ceil(
                        kPi / 4.0 * std::sqrt(static_cast<double>(n) / static_cast<double>(k)))) +
                    1;
  r.min_depth = std::max({ceil_bound(r.bound_log3), ceil_bound(r.bound_nk),
                          ceil_bound(r.bound_log2), std::int64_t{0}});
  return r;
}

SlsBoundsReport sls_bounds(std::int64_t q, double eps) {
  if (q < 3) throw std::invalid_argument("q must be at least 3");
  if (eps < 0.0 || eps >= 1.0) throw std::invalid_argument("need 0 <= eps < 1");
  SlsBoundsReport r;
  r.q = q;
  r.eps = eps;
  r.bound_statement = std::log2(static_cast<double>(q)) + std::log2((1.0 - eps) / 2.0);
  r.bound_proof_form = std::log2((1.0 - eps) * static_cast<double>(q) + 1.0) - 1.0;
  r.quantum_upper = 2;
  r.classical_upper = static_cast<std::int64_t>(
                          std::ceil(std::log(static_cast<double>(q)) / std::log(4.0 / 3.0))) +
                      3;
  r.min_depth = ceil_bound(r.bound_proof_form);
  return r;
}

std::vector<FamilyRow> tensor_family(std::int64_t n, std::int64_t k, int t_max, double eps) {
  if (n < 2 || k < 1 || k > n) throw std::invalid_argument("need 2 <= n and 1 <= k <= n");
  if (t_max < 1) throw std::invalid_argument("t_max must be positive");
  if (eps < 0.0 || eps >= 1.0) throw std::invalid_argument("need 0 <= eps < 1");

  const double gamma = 1.0 - std::log(static_cast<double>(k)) / std::log(static_cast<double>(n));
  std::vector<FamilyRow> rows;
  std::int64_t big_n = 1, big_k = 1;
  for (int t = 1; t <= t_max; ++t) {
    big_n *= n;
    big_k *= k;
    if (big_n > 4096) throw std::invalid_argument("family row exceeds the 4096 size cap");
    FamilyRow row;
    row.t = t;
    row.big_n = big_n;
    row.big_k = big_k;
    row.gamma = gamma;
    const double ratio = static_cast<double>(big_n) / static_cast<double>(big_k);
    row.quantum = static_cast<std::int64_t>(std::ceil(kPi / 4.0 * std::sqrt(ratio))) + 1;
    row.classical_lower = (1.0 - eps) * ratio - 1.0 / static_cast<double>(big_k);
    rows.push_back(row);
  }
  return rows;
}

namespace {

using Mask = std::uint32_t;

struct TreeSearch {
  const std::vector<std::vector<int>>& family;
  std::size_t table_len;
  std::unordered_map<Mask, std::pair<int, int>> memo;  // mask -> (depth, best query)

  std::pair<int, int> solve(Mask mask) {
    if (std::popcount(mask) <= 1) return {0, -1};
    const auto hit = memo.find(mask);
    if (hit != memo.end()) return hit->second;

    int best_depth = INT32_MAX;
    int best_query = -1;
    for (std::size_t i = 0; i < table_len; ++i) {
      Mask parts[3] = {0, 0, 0};
      for (std::size_t c = 0; c < family.size(); ++c)
        if (mask & (Mask{1} << c)) parts[family[c][i] + 1] |= Mask{1} << c;
      if (parts[0] == mask || parts[1] == mask || parts[2] == mask) continue;  // uninformative
      int worst = 0;
      for (const Mask part : parts)
        if (part != 0) worst = std::max(worst, solve(part).first);
      if (1 + worst < best_depth) {
        best_depth = 1 + worst;
        best_query = static_cast<int>(i);
      }
    }
    if (best_query < 0) throw std::invalid_argument("family members are indistinguishable");
    memo[mask] = {best_depth, best_query};
    return {best_depth, best_query};
  }

  std::unique_ptr<DecisionTree::Node> build(Mask mask) {
    auto node = std::make_unique<DecisionTree::Node>();
    if (std::popcount(mask) <= 1) {
      node->guess = std::countr_zero(mask);
      return node;
    }
    const int query = solve(mask).second;
    node->query = query;
    Mask parts[3] = {0, 0, 0};
    for (std::size_t c = 0; c < family.size(); ++c)
      if (mask & (Mask{1} << c))
        parts[family[c][static_cast<std::size_t>(query)] + 1] |= Mask{1} << c;
    for (int a = 0; a < 3; ++a)
      if (parts[a] != 0) node->child[static_cast<std::size_t>(a)] = build(parts[a]);
    return node;
  }
};

}  // namespace

DecisionTree optimal_tree(const std::vector<std::vector<int>>& family, int family_cap) {
  if (family.empty()) throw std::invalid_argument("family must be nonempty");
  if (family_cap < 1 || family_cap > 24) throw std::invalid_argument("family cap must be in [1, 24]");
  if (static_cast<int>(family.size()) > family_cap)
    throw std::invalid_argument("family size exceeds the cap");
  const std::size_t len = family[0].size();
  if (len == 0) throw std::invalid_argument("tables must be nonempty");
  for (const auto& t : family) {
    if (t.size() != len) throw std::invalid_argument("tables must share one length");
    for (int v : t)
      if (v < -1 || v > 1) throw std::invalid_argument("table values must be in {-1, 0, +1}");
  }
  for (std::size_t a = 0; a < family.size(); ++a)
    for (std::size_t b = a + 1; b < family.size(); ++b)
      if (family[a] == family[b])
        throw std::invalid_argument("family members are indistinguishable");

  TreeSearch search{family, len, {}};
  const Mask full = (Mask{1} << family.size()) - 1;
  DecisionTree tree;
  tree.depth = search.solve(full).first;
  tree.root = search.build(full);
  return tree;
}

int tree_classify(const DecisionTree& tree, const std::vector<int>& table) {
  const DecisionTree::Node* node = tree.root.get();
  while (node != nullptr && node->query >= 0) {
    if (static_cast<std::size_t>(node->query) >= table.size())
      throw std::invalid_argument("table shorter than a tree query index");
    node = node->child[static_cast<std::size_t>(table[static_cast<std::size_t>(node->query)] + 1)]
               .get();
  }
  if (node == nullptr) throw std::runtime_error("table is not consistent with the tree");
  return node->guess;
}

}  // namespace wmq
