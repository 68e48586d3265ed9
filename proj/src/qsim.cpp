#include "wmq/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace wmq {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSupportTol = 1e-20;  // on |amplitude|^2

Index checked_total_dim(const std::vector<Index>& dims) {
  if (dims.empty()) throw std::invalid_argument("state needs at least one register");
  Index total = 1;
  for (Index d : dims) {
    if (d < 1) throw std::invalid_argument("register dimension must be >= 1");
    if (total > kMaxStateSize / d) throw std::invalid_argument("state size exceeds 2^22 cap");
    total *= d;
  }
  return total;
}

void ensure_normalized(const StateVector& sv, const char* where) {
  if (std::abs(sv.amps.squaredNorm() - 1.0) > kNormTol)
    throw std::runtime_error(std::string(where) + ": state norm drifted beyond 1e-12");
}

// Stride of a register: product of the dimensions to its right.
Index stride_of(const std::vector<Index>& dims, int reg) {
  Index s = 1;
  for (std::size_t j = static_cast<std::size_t>(reg) + 1; j < dims.size(); ++j) s *= dims[j];
  return s;
}

void check_register(const StateVector& sv, int reg) {
  if (reg < 0 || reg >= sv.num_registers()) throw std::invalid_argument("register index out of range");
}

Index reg_value(Index flat, Index stride, Index dim) { return (flat / stride) % dim; }

// Deterministic uniform double in [0, 1) from a seeded generator.
double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int encode_mod4(int value) { return value == 1 ? 1 : value == -1 ? 3 : 0; }

StateVector xor4_impl(const StateVector& sv, const std::vector<int>& table, int main_register,
                      int answer_register, bool inverse) {
  check_register(sv, main_register);
  check_register(sv, answer_register);
  if (main_register == answer_register)
    throw std::invalid_argument("main and answer registers must differ");
  if (sv.dims[static_cast<std::size_t>(answer_register)] != 4)
    throw std::invalid_argument("answer register must have dimension 4");
  const Index domain = static_cast<Index>(table.size());
  if (sv.dims[static_cast<std::size_t>(main_register)] < domain)
    throw std::invalid_argument("main register smaller than oracle domain");

  const Index main_stride = stride_of(sv.dims, main_register);
  const Index answer_stride = stride_of(sv.dims, answer_register);
  const Index main_dim = sv.dims[static_cast<std::size_t>(main_register)];

  StateVector out;
  out.dims = sv.dims;
  out.amps = CVector::Zero(sv.total_dim());
  for (Index x = 0; x < sv.total_dim(); ++x) {
    const Index i = reg_value(x, main_stride, main_dim);
    Index target = x;
    if (i < domain) {
      const Index a = reg_value(x, answer_stride, 4);
      const int enc = encode_mod4(table[static_cast<std::size_t>(i)]);
      const Index shifted = inverse ? (a + 4 - enc) % 4 : (a + enc) % 4;
      target = x + (shifted - a) * answer_stride;
    }
    out.amps(target) = sv.amps(x);
  }
  ensure_normalized(out, "oracle_xor4");
  return out;
}

StateVector phase_impl(const StateVector& sv, const std::vector<int>& table, double phi,
                       int target_register, bool marked_mode) {
  check_register(sv, target_register);
  const Index stride = stride_of(sv.dims, target_register);
  const Index dim = sv.dims[static_cast<std::size_t>(target_register)];
  const Index domain = static_cast<Index>(table.size());
  const Complex factor = std::polar(1.0, phi);

  StateVector out = sv;
  for (Index x = 0; x < sv.total_dim(); ++x) {
    const Index i = reg_value(x, stride, dim);
    if (i >= domain) continue;
    const int f = table[static_cast<std::size_t>(i)];
    const bool hit = marked_mode ? f != 0 : f == -1;
    if (hit) out.amps(x) *= factor;
  }
  ensure_normalized(out, "oracle_phase");
  return out;
}

}  // namespace

StateVector make_state(std::vector<Index> dims, CVector amps) {
  const Index total = checked_total_dim(dims);
  if (amps.size() != total) throw std::invalid_argument("amplitude count does not match dimensions");
  StateVector sv{std::move(dims), std::move(amps)};
  ensure_normalized(sv, "make_state");
  return sv;
}

StateVector basis_state(std::vector<Index> dims, const std::vector<Index>& values) {
  const Index total = checked_total_dim(dims);
  if (values.size() != dims.size()) throw std::invalid_argument("one value per register required");
  Index flat = 0;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    if (values[j] < 0 || values[j] >= dims[j]) throw std::invalid_argument("basis value out of range");
    flat = flat * dims[j] + values[j];
  }
  StateVector sv;
  sv.dims = std::move(dims);
  sv.amps = CVector::Zero(total);
  sv.amps(flat) = 1.0;
  return sv;
}

StateVector uniform_state(std::vector<Index> dims) {
  const Index total = checked_total_dim(dims);
  StateVector sv;
  sv.dims = std::move(dims);
  sv.amps = CVector::Constant(total, Complex(1.0 / std::sqrt(static_cast<double>(total)), 0.0));
  return sv;
}

QueryOracle::QueryOracle(std::vector<int> table) : table_(std::move(table)) {
  if (table_.empty()) throw std::invalid_argument("oracle table must be nonempty");
  for (int v : table_)
    if (v < -1 || v > 1) throw std::invalid_argument("oracle values must be in {-1, 0, +1}");
}

int QueryOracle::classical_query(Index i) {
  if (i < 0 || i >= domain_size()) throw std::invalid_argument("oracle query out of domain");
  charge();
  return peek(i);
}

StateVector apply_unitary(const StateVector& sv, const CMatrix& u, int target_register) {
  check_register(sv, target_register);
  const Index dim = sv.dims[static_cast<std::size_t>(target_register)];
  if (u.rows() != dim || u.cols() != dim)
    throw std::invalid_argument("unitary dimension does not match target register");
  const double defect = (u.adjoint() * u - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (defect > kUnitaryTol) throw std::invalid_argument("matrix is not unitary within 1e-10");

  const Index stride = stride_of(sv.dims, target_register);
  const Index total = sv.total_dim();
  StateVector out;
  out.dims = sv.dims;
  out.amps = CVector::Zero(total);
  CVector slice(dim);
  // Walk every (prefix, suffix) block around the target register.
  for (Index base = 0; base < total; ++base) {
    if (reg_value(base, stride, dim) != 0) continue;
    for (Index v = 0; v < dim; ++v) slice(v) = sv.amps(base + v * stride);
    const CVector mixed = u * slice;
    for (Index v = 0; v < dim; ++v) out.amps(base + v * stride) = mixed(v);
  }
  ensure_normalized(out, "apply_unitary");
  return out;
}

StateVector oracle_xor4(const StateVector& sv, QueryOracle& oracle, int main_register,
                        int answer_register) {
  StateVector out = xor4_impl(sv, oracle.table_, main_register, answer_register, false);
  oracle.charge();
  return out;
}

StateVector oracle_xor4_inverse(const StateVector& sv, QueryOracle& oracle, int main_register,
                                int answer_register) {
  StateVector out = xor4_impl(sv, oracle.table_, main_register, answer_register, true);
  oracle.charge();
  return out;
}

StateVector oracle_phase(const StateVector& sv, QueryOracle& oracle, double phi,
                         int target_register) {
  StateVector out = phase_impl(sv, oracle.table_, phi, target_register, false);
  oracle.charge();
  return out;
}

StateVector oracle_phase_marked(const StateVector& sv, QueryOracle& oracle, double phi,
                                int target_register) {
  StateVector out = phase_impl(sv, oracle.table_, phi, target_register, true);
  oracle.charge();
  return out;
}

StateVector kickback(const StateVector& sv, QueryOracle& oracle) {
  const Index total = sv.total_dim();
  const Index domain = oracle.domain_size();
  for (Index x = 0; x < total; ++x) {
    if (std::norm(sv.amps(x)) <= kSupportTol) continue;
    if (x >= domain || oracle.table_[static_cast<std::size_t>(x)] == 0)
      throw std::invalid_argument("kickback requires f = +-1 on the state's support");
  }

  const Complex im(0.0, 1.0);
  CVector ancilla(4);
  ancilla << Complex(0.5, 0.0), Complex(0.0, 0.5), Complex(-0.5, 0.0), Complex(0.0, -0.5);

  // Work on the flattened joint index so the oracle sees the full support.
  StateVector joint;
  joint.dims = {total, 4};
  joint.amps = CVector::Zero(total * 4);
  for (Index x = 0; x < total; ++x)
    for (Index a = 0; a < 4; ++a) joint.amps(x * 4 + a) = sv.amps(x) * ancilla(a);

  joint = oracle_xor4(joint, oracle, 0, 1);
  joint.amps *= im;
  StateVector out = detach_register(joint, 1, ancilla);
  out.dims = sv.dims;
  return out;
}

std::vector<double> register_distribution(const StateVector& sv, int reg) {
  check_register(sv, reg);
  const Index stride = stride_of(sv.dims, reg);
  const Index dim = sv.dims[static_cast<std::size_t>(reg)];
  std::vector<double> probs(static_cast<std::size_t>(dim), 0.0);
  for (Index x = 0; x < sv.total_dim(); ++x)
    probs[static_cast<std::size_t>(reg_value(x, stride, dim))] += std::norm(sv.amps(x));
  return probs;
}

namespace {

Index pick_outcome(const std::vector<double>& probs, const MeasureMode& mode, const char* what) {
  if (const auto* branch = std::get_if<BranchMode>(&mode)) {
    if (branch->outcome < 0 || branch->outcome >= static_cast<Index>(probs.size()))
      throw std::invalid_argument(std::string(what) + ": branch outcome out of range");
    if (probs[static_cast<std::size_t>(branch->outcome)] < kBranchMinProb)
      throw std::runtime_error(std::string(what) + ": branch outcome probability below 1e-12");
    return branch->outcome;
  }
  std::mt19937_64 rng(std::get<SampleMode>(mode).seed);
  const double u = next_uniform(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<Index>(i);
  }
  return static_cast<Index>(probs.size() - 1);
}

}  // namespace

Outcome measure_register(const StateVector& sv, int reg, const MeasureMode& mode) {
  const std::vector<double> probs = register_distribution(sv, reg);
  const Index outcome = pick_outcome(probs, mode, "measure_register");
  const double p = probs[static_cast<std::size_t>(outcome)];

  const Index stride = stride_of(sv.dims, reg);
  const Index dim = sv.dims[static_cast<std::size_t>(reg)];
  StateVector collapsed;
  collapsed.dims = sv.dims;
  collapsed.amps = CVector::Zero(sv.total_dim());
  const double scale = 1.0 / std::sqrt(p);
  for (Index x = 0; x < sv.total_dim(); ++x)
    if (reg_value(x, stride, dim) == outcome) collapsed.amps(x) = sv.amps(x) * scale;
  return Outcome{outcome, p, std::move(collapsed)};
}

MeasurementBasis MeasurementBasis::from_columns(CMatrix m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument("measurement basis must be square");
  const double defect =
      (m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
  if (defect > kUnitaryTol)
    throw std::invalid_argument("measurement basis columns are not orthonormal within 1e-10");
  return MeasurementBasis{std::move(m)};
}

std::vector<double> basis_distribution(const StateVector& sv, const MeasurementBasis& basis) {
  if (basis.vectors.rows() != sv.total_dim())
    throw std::invalid_argument("basis dimension does not match state");
  const CVector overlaps = basis.vectors.adjoint() * sv.amps;
  std::vector<double> probs(static_cast<std::size_t>(overlaps.size()));
  double sum = 0.0;
  for (Index i = 0; i < overlaps.size(); ++i) {
    probs[static_cast<std::size_t>(i)] = std::norm(overlaps(i));
    sum += probs[static_cast<std::size_t>(i)];
  }
  if (std::abs(sum - 1.0) > kProbSumTol)
    throw std::runtime_error("basis outcome probabilities do not sum to 1 within 1e-9");
  return probs;
}

Outcome measure_in_basis(const StateVector& sv, const MeasurementBasis& basis,
                         const MeasureMode& mode) {
  const std::vector<double> probs = basis_distribution(sv, basis);
  const Index outcome = pick_outcome(probs, mode, "measure_in_basis");
  const double p = probs[static_cast<std::size_t>(outcome)];

  const Complex overlap = (basis.vectors.col(outcome).adjoint() * sv.amps)(0, 0);
  StateVector collapsed;
  collapsed.dims = sv.dims;
  collapsed.amps = basis.vectors.col(outcome) * (overlap / std::abs(overlap));
  return Outcome{outcome, p, std::move(collapsed)};
}

namespace {

Projection project_impl(const StateVector& sv, int reg, Index value, bool keep_equal) {
  check_register(sv, reg);
  const Index stride = stride_of(sv.dims, reg);
  const Index dim = sv.dims[static_cast<std::size_t>(reg)];
  if (value < 0 || value >= dim) throw std::invalid_argument("projection value out of range");

  StateVector kept;
  kept.dims = sv.dims;
  kept.amps = CVector::Zero(sv.total_dim());
  double p = 0.0;
  for (Index x = 0; x < sv.total_dim(); ++x) {
    if ((reg_value(x, stride, dim) == value) == keep_equal) {
      kept.amps(x) = sv.amps(x);
      p += std::norm(sv.amps(x));
    }
  }
  if (p < kBranchMinProb) throw std::runtime_error("projection probability below 1e-12");
  kept.amps /= std::sqrt(p);
  return Projection{p, std::move(kept)};
}

}  // namespace

Projection project_register_equal(const StateVector& sv, int reg, Index value) {
  return project_impl(sv, reg, value, true);
}

Projection project_register_not_equal(const StateVector& sv, int reg, Index value) {
  return project_impl(sv, reg, value, false);
}

StateVector detach_register(const StateVector& sv, int reg, const CVector& reference) {
  check_register(sv, reg);
  const Index dim = sv.dims[static_cast<std::size_t>(reg)];
  if (reference.size() != dim)
    throw std::invalid_argument("reference state dimension does not match register");
  if (std::abs(reference.squaredNorm() - 1.0) > 1e-9)
    throw std::invalid_argument("reference state must be normalized");

  const Index stride = stride_of(sv.dims, reg);
  std::vector<Index> out_dims;
  for (std::size_t j = 0; j < sv.dims.size(); ++j)
    if (static_cast<int>(j) != reg) out_dims.push_back(sv.dims[j]);
  if (out_dims.empty()) out_dims.push_back(1);

  StateVector out;
  out.dims = std::move(out_dims);
  out.amps = CVector::Zero(sv.total_dim() / dim);
  Index write = 0;
  for (Index base = 0; base < sv.total_dim(); ++base) {
    if (reg_value(base, stride, dim) != 0) continue;
    Complex acc(0.0, 0.0);
    for (Index v = 0; v < dim; ++v) acc += std::conj(reference(v)) * sv.amps(base + v * stride);
    out.amps(write++) = acc;
  }
  const double p = out.amps.squaredNorm();
  if (std::abs(p - 1.0) > 1e-9)
    throw std::runtime_error("detach_register: register is entangled with the rest of the state");
  out.amps /= std::sqrt(p);
  return out;
}

namespace {

// Reflection about the flat uniform state: 2|u><u| - I.
void diffusion_standard(CVector& v) {
  const Complex mean = v.sum() / static_cast<double>(v.size());
  for (Index i = 0; i < v.size(); ++i) v(i) = 2.0 * mean - v(i);
}

// I + (e^{i psi} - 1)|u><u|.
void diffusion_phased(CVector& v, double psi) {
  const Complex w = std::polar(1.0, psi) - Complex(1.0, 0.0);
  const Complex mean = v.sum() / static_cast<double>(v.size());
  for (Index i = 0; i < v.size(); ++i) v(i) += w * mean;
}

void check_uniform_marked_shape(const CVector& amps, Index k) {
  const double target = 1.0 / std::sqrt(static_cast<double>(k));
  Index hits = 0;
  for (Index i = 0; i < amps.size(); ++i) {
    if (std::abs(amps(i) - Complex(target, 0.0)) <= 1e-9) {
      ++hits;
    } else if (std::abs(amps(i)) > 1e-9) {
      throw std::runtime_error(
          "amplification did not reach the marked superposition exactly (k mismatch with the "
          "oracle table?)");
    }
  }
  if (hits != k)
    throw std::runtime_error(
        "amplification did not reach the marked superposition exactly (k mismatch with the "
        "oracle table?)");
}

}  // namespace

Prepared grover_exact(QueryOracle& oracle, Index n, Index k) {
  if (n < 1 || k < 1 || k > n) throw std::invalid_argument("need 1 <= k <= n");
  if (oracle.domain_size() != n) throw std::invalid_argument("oracle domain must equal n");

  StateVector state = uniform_state({n});
  if (k == n) return Prepared{std::move(state), 0};

  const std::uint64_t start = oracle.queries();
  const double theta = std::asin(std::sqrt(static_cast<double>(k) / static_cast<double>(n)));
  const std::uint64_t budget = static_cast<std::uint64_t>(
      std::ceil(kPi / 4.0 * std::sqrt(static_cast<double>(n) / static_cast<double>(k))));

  // Smallest m with (2m+1) theta >= pi/2; always within the budget.
  std::uint64_t m = static_cast<std::uint64_t>(std::max(1.0, std::ceil(kPi / (4.0 * theta) - 0.5)));
  while ((2.0 * static_cast<double>(m) + 1.0) * theta < kPi / 2.0 - 1e-15) ++m;
  if (m > budget) throw std::runtime_error("iteration count exceeded the amplification budget");

  for (std::uint64_t it = 0; it + 1 < m; ++it) {
    state = oracle_phase_marked(state, oracle, kPi);
    diffusion_standard(state.amps);
  }

  // Phase-matched final iteration: (phi, psi) chosen so the component outside
  // the marked span vanishes exactly.
  const double alpha = (2.0 * static_cast<double>(m) - 1.0) * theta;
  const double a = std::cos(theta) * std::cos(theta);
  const double b = std::cos(theta) * std::sin(theta) * std::sin(alpha);
  const double c = std::cos(alpha);
  const double cos_phi = std::clamp(c * (0.5 - a) / b, -1.0, 1.0);
  const double phi = std::acos(cos_phi);
  const Complex z = a * c + b * std::polar(1.0, phi);
  const Complex w = -c / z;
  const double psi = std::arg(Complex(1.0, 0.0) + w);

  state = oracle_phase_marked(state, oracle, phi);
  diffusion_phased(state.amps, psi);

  // The dynamics stay uniform over marked and unmarked entries, so after
  // removing the global phase the marked amplitudes must all be +1/sqrt(k).
  Index lead = 0;
  state.amps.cwiseAbs().maxCoeff(&lead);
  const Complex leading = state.amps(lead);
  state.amps *= std::conj(leading) / std::abs(leading);
  check_uniform_marked_shape(state.amps, k);

  const std::uint64_t used = oracle.queries() - start;
  if (used > budget) throw std::runtime_error("amplification exceeded its query budget");
  return Prepared{std::move(state), used};
}

Prepared construct_signed_state(QueryOracle& oracle, Index n, Index k) {
  Prepared prep = grover_exact(oracle, n, k);
  prep.state = oracle_phase(prep.state, oracle, kPi);
  prep.queries_used += 1;
  return prep;
}

}  // namespace wmq
