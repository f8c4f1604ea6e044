#include "qfilt/qma.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>

#include "qfilt/errors.hpp"
#include "qfilt/jordan.hpp"
#include "qfilt/rng.hpp"

namespace qfilt {

void validate_verifier(const VerifierCircuit& verifier) {
  if (verifier.witness_qubits < 1)
    throw ValidationError("verifier needs at least one witness qubit");
  if (verifier.scratch_qubits < 0)
    throw ValidationError("scratch qubit count must be non-negative");
  const Eigen::Index d = verifier.dim();
  if (verifier.v.rows() != d || verifier.v.cols() != d)
    throw ValidationError("verifier matrix does not match the qubit count");
  if (!verifier.v.isUnitary(1e-10))
    throw ValidationError("verifier matrix is not unitary");
  if (!(verifier.completeness - verifier.soundness > 0.0))
    throw ValidationError("completeness must exceed soundness");
}

Projector scratch_projector(const VerifierCircuit& verifier) {
  const Eigen::Index d = verifier.dim();
  const Eigen::Index witness_dim = Eigen::Index{1} << verifier.witness_qubits;
  Projector p;
  p.matrix = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < witness_dim; ++i) p.matrix(i, i) = 1.0;  // scratch bits zero
  p.rank = static_cast<int>(witness_dim);
  return p;
}

Projector accept_projector(const VerifierCircuit& verifier) {
  const Eigen::Index d = verifier.dim();
  CMatrix pi1 = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    if (i & 1) pi1(i, i) = 1.0;  // accept bit is qubit 0
  Projector p;
  p.matrix = verifier.v.adjoint() * pi1 * verifier.v;
  p.rank = static_cast<int>(d / 2);
  return p;
}

VerifierCircuit identity_verifier(int witness_qubits, int scratch_qubits) {
  VerifierCircuit ver;
  ver.witness_qubits = witness_qubits;
  ver.scratch_qubits = scratch_qubits;
  ver.v = CMatrix::Identity(Eigen::Index{1} << (witness_qubits + scratch_qubits),
                            Eigen::Index{1} << (witness_qubits + scratch_qubits));
  ver.completeness = 1.0;
  ver.soundness = 0.0;
  ver.label = "identity verifier";
  validate_verifier(ver);
  return ver;
}

VerifierCircuit rotation_verifier(double theta) {
  if (!(theta > 0.0 && theta < std::numbers::pi / 4.0))
    throw ValidationError("rotation verifier needs theta in (0, pi/4)");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  // V = c I - i s (Y on qubit 0) (X on qubit 1); index bit 0 is qubit 0.
  CMatrix v = CMatrix::Zero(4, 4);
  v(0, 0) = c;
  v(3, 0) = s;
  v(1, 1) = c;
  v(2, 1) = -s;
  v(2, 2) = c;
  v(1, 2) = s;
  v(3, 3) = c;
  v(0, 3) = -s;
  VerifierCircuit ver;
  ver.witness_qubits = 1;
  ver.scratch_qubits = 1;
  ver.v = std::move(v);
  ver.completeness = c * c;
  ver.soundness = s * s;
  ver.label = "rotation verifier";
  validate_verifier(ver);
  return ver;
}

int switch_count_for(double mu, double eps) {
  if (!(mu > 0.0 && mu < 1.0)) throw ValidationError("filter center must lie in (0, 1)");
  if (!(eps > 0.0)) throw ValidationError("bandwidth must be positive");
  int k = static_cast<int>(std::ceil(2.0 * mu * (1.0 - mu) / (eps * eps)));
  if (k < 1) k = 1;
  if (k % 2 == 0) ++k;
  return k;
}

StateVector apply_inverse_switch_circuit(const Projector& q, const Projector& r,
                                         const CVector& psi_front, double mu, int k,
                                         int qubit_cap) {
  const Eigen::Index front = q.matrix.rows();
  if (psi_front.size() != front)
    throw ValidationError("front state does not match the projector dimension");
  if (std::abs(psi_front.norm() - 1.0) > 1e-12)
    throw ValidationError("front state must be normalized");
  int m = 0;
  while ((Eigen::Index{1} << m) < front) ++m;
  if ((Eigen::Index{1} << m) != front)
    throw ValidationError("projector dimension must be a power of two");
  const SwitchCircuit circuit(q.matrix, r.matrix, m, 0, k, qubit_cap);
  const SwitchFilterState filt = switch_filter_state(mu, k);

  StateVector state{circuit.layout(),
                    CVector(static_cast<Eigen::Index>(circuit.layout().dimension()))};
  const Eigen::Index ancilla_dim = Eigen::Index{1} << k;
  for (Eigen::Index j = 0; j < ancilla_dim; ++j)
    state.amp.segment(j * front, front) = filt.amplitudes[j] * psi_front;
  state.normalize();  // product of unit vectors; remove 2^k-term summation drift
  circuit.apply_inverse(state);
  return state;
}

namespace {

WitnessResult run_witness_pipeline(const VerifierCircuit& verifier, double mu, int k,
                                   std::uint64_t seed, const AmplificationOptions& opts) {
  validate_verifier(verifier);
  if (!(mu > 0.0 && mu < 1.0)) throw ValidationError("filter center must lie in (0, 1)");
  if (k % 2 == 0) throw ValidationError("recording count must be odd");
  const int n = verifier.witness_qubits;
  const int h = verifier.scratch_qubits;
  const int m = n + h;

  const Projector q = scratch_projector(verifier);
  const Projector r = accept_projector(verifier);
  const SwitchCircuit circuit(q.matrix, r.matrix, n, h, k, opts.qubit_cap);
  const SwitchFilterState filt = switch_filter_state(mu, k);

  RngStream rng(seed);
  // Accept bit |1> (x) Haar-random rest, pulled back through V^dag: a
  // uniformly random state in the image of R.
  const Eigen::Index front = Eigen::Index{1} << m;
  const Eigen::Index rest = front / 2;
  CVector raw = CVector::Zero(front);
  if (m == 1) {
    raw[1] = 1.0;  // no rest register: the accept-1 state is unique
  } else {
    RegisterLayout rest_layout{m - 1, 0, 0, 0, opts.qubit_cap};
    const StateVector chi = random_state(rest_layout, rng);
    for (Eigen::Index i = 0; i < rest; ++i) raw[2 * i + 1] = chi.amp[i];
  }
  const CVector psi_front = verifier.v.adjoint() * raw;

  StateVector state{circuit.layout(),
                    CVector(static_cast<Eigen::Index>(circuit.layout().dimension()))};
  const Eigen::Index ancilla_dim = Eigen::Index{1} << k;
  for (Eigen::Index j = 0; j < ancilla_dim; ++j)
    state.amp.segment(j * front, front) = filt.amplitudes[j] * psi_front;
  state.normalize();  // product of unit vectors; remove 2^k-term summation drift
  circuit.apply_inverse(state);

  WitnessResult result;
  result.recordings = k;
  const ZeroTailProjector target(n);  // scratch and every recording ancilla read zero
  result.report = amplify(state, target, std::size_t{1} << m, opts, rng);
  if (result.report.succeeded) {
    const double acceptance = expectation_value(state, r.matrix);
    result.report.output_energy = acceptance;
    result.report.output_energy_normalized = acceptance;
    const JordanDecomposition dec = jordan_decompose(q, r);
    if (dec.qrq_spectrum.size() > 0) {
      Eigen::Index best = 0;
      (dec.qrq_spectrum.array() - acceptance).abs().minCoeff(&best);
      result.report.energy_exact_nearest = dec.qrq_spectrum[best];
    }
    result.state = std::move(state);
  }
  return result;
}

}  // namespace

WitnessResult prepare_witness(const VerifierCircuit& verifier, double mu, double eps,
                              std::uint64_t seed, const AmplificationOptions& opts) {
  return run_witness_pipeline(verifier, mu, switch_count_for(mu, eps), seed, opts);
}

WitnessResult prepare_witness_with_k(const VerifierCircuit& verifier, double mu, int k,
                                     std::uint64_t seed, const AmplificationOptions& opts) {
  return run_witness_pipeline(verifier, mu, k, seed, opts);
}

}  // namespace qfilt
