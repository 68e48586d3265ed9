#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "wmq/types.hpp"

namespace wmq {

inline constexpr double kNormTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kProbSumTol = 1e-9;
inline constexpr double kBranchMinProb = 1e-12;
inline constexpr Index kMaxStateSize = Index{1} << 22;

/// Normalized complex amplitudes over a product of registers. Flat indexing
/// is row major with register 0 slowest: a joint value (v_0, ..., v_{m-1})
/// sits at sum_j v_j * prod_{l>j} dims[l].
struct StateVector {
  std::vector<Index> dims;
  CVector amps;

  Index total_dim() const { return amps.size(); }
  Index num_registers() const { return static_cast<Index>(dims.size()); }
};

/// Validates dimensions and the normalization invariant (within 1e-12).
StateVector make_state(std::vector<Index> dims, CVector amps);

StateVector basis_state(std::vector<Index> dims, const std::vector<Index>& values);

/// Flat uniform superposition 1/sqrt(N) over all joint indices.
StateVector uniform_state(std::vector<Index> dims);

/// Ternary black box over {0..n-1} with a tamper-proof query counter: the
/// counter advances exactly once per classical_query and once per oracle
/// unitary (any operation whose action depends pointwise on the table), and
/// cannot be reset or rewound.
class QueryOracle {
 public:
  explicit QueryOracle(std::vector<int> table);

  Index domain_size() const { return static_cast<Index>(table_.size()); }
  std::uint64_t queries() const { return counter_; }

  /// Read one value classically; counts one query.
  int classical_query(Index i);

 private:
  int peek(Index i) const { return table_[static_cast<std::size_t>(i)]; }
  void charge() { ++counter_; }

  std::vector<int> table_;
  std::uint64_t counter_ = 0;

  friend StateVector oracle_xor4(const StateVector&, QueryOracle&, int, int);
  friend StateVector oracle_xor4_inverse(const StateVector&, QueryOracle&, int, int);
  friend StateVector oracle_phase(const StateVector&, QueryOracle&, double, int);
  friend StateVector oracle_phase_marked(const StateVector&, QueryOracle&, double, int);
  friend StateVector kickback(const StateVector&, QueryOracle&);
};

/// Applies a unitary (checked to 1e-10) to one register.
StateVector apply_unitary(const StateVector& sv, const CMatrix& u, int target_register);

/// |i>|a> -> |i>|a + enc(f(i)) mod 4> with enc(+1) = 1, enc(0) = 0,
/// enc(-1) = 3. The answer register must have dimension 4; main-register
/// values outside the oracle domain are left untouched. Counts one query.
StateVector oracle_xor4(const StateVector& sv, QueryOracle& oracle, int main_register,
                        int answer_register);

/// Inverse of oracle_xor4 (subtracts the encoding). Counts one query.
StateVector oracle_xor4_inverse(const StateVector& sv, QueryOracle& oracle, int main_register,
                                int answer_register);

/// Multiplies the amplitude of |i> by e^{i phi} where f(i) = -1 and by 1
/// where f(i) is +1 or 0; phi = pi is the sign oracle. Counts one query.
StateVector oracle_phase(const StateVector& sv, QueryOracle& oracle, double phi,
                         int target_register = 0);

/// Multiplies the amplitude of |i> by e^{i phi} where f(i) != 0; used by the
/// amplitude-amplification loop. Counts one query.
StateVector oracle_phase_marked(const StateVector& sv, QueryOracle& oracle, double phi,
                                int target_register = 0);

/// Sign flip via the explicit mod-4 ancilla gadget: attach
/// 1/2(|0> + i|1> - |2> - i|3>), add f to it mod 4, apply a global phase i,
/// detach. Matches oracle_phase(pi) up to global phase; requires f = +-1 on
/// the support and counts one query.
StateVector kickback(const StateVector& sv, QueryOracle& oracle);

struct SampleMode {
  std::uint64_t seed = 0;
};
struct BranchMode {
  Index outcome = 0;
};
using MeasureMode = std::variant<SampleMode, BranchMode>;

struct Outcome {
  Index index = 0;
  double probability = 0.0;
  StateVector collapsed;
};

/// Marginal distribution of one register's computational value.
std::vector<double> register_distribution(const StateVector& sv, int reg);

/// Sample mode draws from the marginal with a seeded generator; branch mode
/// forces a named outcome (error when its probability is below 1e-12). The
/// collapsed state is renormalized.
Outcome measure_register(const StateVector& sv, int reg, const MeasureMode& mode);

/// Columns are the basis vectors; orthonormality is checked to 1e-10.
struct MeasurementBasis {
  CMatrix vectors;

  static MeasurementBasis from_columns(CMatrix m);
};

std::vector<double> basis_distribution(const StateVector& sv, const MeasurementBasis& basis);

Outcome measure_in_basis(const StateVector& sv, const MeasurementBasis& basis,
                         const MeasureMode& mode);

struct Projection {
  double probability = 0.0;
  StateVector state;
};

/// Two-outcome projective measurement of one register: the part where it
/// equals `value`, or the complement. Not a query.
Projection project_register_equal(const StateVector& sv, int reg, Index value);
Projection project_register_not_equal(const StateVector& sv, int reg, Index value);

/// Removes a register known to hold the pure state `reference`
/// (unentangled); errors if the overlap leaves a residual above tolerance.
StateVector detach_register(const StateVector& sv, int reg, const CVector& reference);

struct Prepared {
  StateVector state;
  std::uint64_t queries_used = 0;
};

/// Exact amplitude amplification: from the flat uniform state to the uniform
/// superposition over the k marked (nonzero) oracle entries, exact within
/// 1e-9 per amplitude. Uses standard iterations plus one phase-matched final
/// iteration; at most ceil(pi/4 sqrt(n/k)) queries, none when k = n.
Prepared grover_exact(QueryOracle& oracle, Index n, Index k);

/// Prepares 1/sqrt(k) sum_i f(i)|i> exactly: grover_exact plus one sign
/// query. At most ceil(pi/4 sqrt(n/k)) + 1 queries; exactly 1 when k = n.
Prepared construct_signed_state(QueryOracle& oracle, Index n, Index k);

}  // namespace wmq
