#include "qfilt/state.hpp"

#include <cmath>
#include <string>

#include "qfilt/errors.hpp"

namespace qfilt {

void RegisterLayout::validate() const {
  if (system_qubits < 0 || scratch_qubits < 0 || ancilla_blocks < 0 || block_qubits < 0)
    throw ValidationError("register layout: negative qubit count");
  if (ancilla_blocks > 0 && block_qubits < 1)
    throw ValidationError("register layout: ancilla blocks need at least one qubit each");
  if (system_qubits + scratch_qubits < 1)
    throw ValidationError("register layout: empty front register");
  const int total = total_qubits();
  if (total > qubit_cap)
    throw CapacityError("register layout: " + std::to_string(total) + " qubits exceeds cap of " +
                        std::to_string(qubit_cap));
}

double StateVector::norm() const {
  double sum = 0.0, comp = 0.0;  // Kahan-compensated sum of squared moduli
  for (Eigen::Index i = 0; i < amp.size(); ++i) {
    const double y = std::norm(amp[i]) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return std::sqrt(sum);
}

void StateVector::normalize() {
  const double n = norm();
  if (n <= 0.0) throw NumericsError("cannot normalize a zero state vector");
  amp /= n;
}

void StateVector::check_norm() const {
  if (std::abs(norm() - 1.0) > 1e-12)
    throw NumericsError("state vector norm drifted beyond 1e-12");
}

StateVector basis_state(const RegisterLayout& layout, std::size_t index) {
  layout.validate();
  if (index >= layout.dimension()) throw ValidationError("basis index out of range");
  StateVector s{layout, CVector::Zero(static_cast<Eigen::Index>(layout.dimension()))};
  s.amp[static_cast<Eigen::Index>(index)] = 1.0;
  return s;
}

StateVector random_state(const RegisterLayout& layout, RngStream& rng) {
  layout.validate();
  const auto d = static_cast<Eigen::Index>(layout.dimension());
  StateVector s{layout, CVector(d)};
  for (Eigen::Index i = 0; i < d; ++i) s.amp[i] = Complex(rng.normal(), rng.normal());
  s.normalize();
  return s;
}

StateVector random_state(const RegisterLayout& layout, std::uint64_t seed) {
  RngStream rng(seed);
  return random_state(layout, rng);
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.amp.size() != b.amp.size()) throw ValidationError("inner product: dimension mismatch");
  return a.amp.dot(b.amp);  // Eigen's dot conjugates the left argument
}

void apply_front_matrix(StateVector& state, const CMatrix& m) {
  const Eigen::Index fd = m.rows();
  if (m.cols() != fd) throw ValidationError("front matrix must be square");
  const Eigen::Index d = state.amp.size();
  if (fd <= 0 || d % fd != 0) throw ValidationError("front matrix does not divide state dimension");
  Eigen::Map<CMatrix> view(state.amp.data(), fd, d / fd);
  view = (m * view).eval();
}

void apply_block_matrix(StateVector& state, const CMatrix& m, int offset_qubits) {
  const Eigen::Index bd = m.rows();
  if (m.cols() != bd) throw ValidationError("block matrix must be square");
  const std::size_t d = static_cast<std::size_t>(state.amp.size());
  const std::size_t low = std::size_t{1} << offset_qubits;
  const std::size_t span = low * static_cast<std::size_t>(bd);
  if (span == 0 || d % span != 0) throw ValidationError("block matrix does not fit the layout");
  CVector scratch(bd);
  for (std::size_t high = 0; high < d; high += span) {
    for (std::size_t lo = 0; lo < low; ++lo) {
      const std::size_t base = high + lo;
      for (Eigen::Index b = 0; b < bd; ++b)
        scratch[b] = state.amp[static_cast<Eigen::Index>(base + static_cast<std::size_t>(b) * low)];
      scratch = (m * scratch).eval();
      for (Eigen::Index b = 0; b < bd; ++b)
        state.amp[static_cast<Eigen::Index>(base + static_cast<std::size_t>(b) * low)] = scratch[b];
    }
  }
}

void apply_single_qubit(StateVector& state, const Eigen::Matrix2cd& g, int qubit) {
  const std::size_t d = static_cast<std::size_t>(state.amp.size());
  const std::size_t bit = std::size_t{1} << qubit;
  if (bit >= d) throw ValidationError("single-qubit gate: qubit index out of range");
  for (std::size_t i = 0; i < d; ++i) {
    if (i & bit) continue;
    const Complex a0 = state.amp[static_cast<Eigen::Index>(i)];
    const Complex a1 = state.amp[static_cast<Eigen::Index>(i | bit)];
    state.amp[static_cast<Eigen::Index>(i)] = g(0, 0) * a0 + g(0, 1) * a1;
    state.amp[static_cast<Eigen::Index>(i | bit)] = g(1, 0) * a0 + g(1, 1) * a1;
  }
}

void apply_hadamard_block(StateVector& state, int block) {
  static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd h;
  h << inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2;
  const int off = state.layout.block_offset(block);
  for (int t = 0; t < state.layout.block_qubits; ++t) apply_single_qubit(state, h, off + t);
}

double zero_tail_overlap(const StateVector& state, int prefix_qubits) {
  const Eigen::Index pd = Eigen::Index{1} << prefix_qubits;
  if (pd > state.amp.size()) throw ValidationError("zero-tail prefix larger than the state");
  return state.amp.head(pd).squaredNorm();
}

void zero_tail_project(StateVector& state, int prefix_qubits) {
  const Eigen::Index pd = Eigen::Index{1} << prefix_qubits;
  if (pd > state.amp.size()) throw ValidationError("zero-tail prefix larger than the state");
  state.amp.tail(state.amp.size() - pd).setZero();
}

void zero_tail_reflect(StateVector& state, int prefix_qubits) {
  const Eigen::Index pd = Eigen::Index{1} << prefix_qubits;
  if (pd > state.amp.size()) throw ValidationError("zero-tail prefix larger than the state");
  state.amp.head(pd) = -state.amp.head(pd);
}

void reflect_about(StateVector& state, const StateVector& ref) {
  if (ref.amp.size() != state.amp.size()) throw ValidationError("reflection: dimension mismatch");
  const Complex c = ref.amp.dot(state.amp);
  state.amp = 2.0 * c * ref.amp - state.amp;
}

}  // namespace qfilt
