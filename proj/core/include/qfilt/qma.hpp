#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qfilt/amplify.hpp"
#include "qfilt/operators.hpp"
#include "qfilt/state.hpp"
#include "qfilt/switch_circuit.hpp"
#include "qfilt/types.hpp"

namespace qfilt {

// A verification circuit on m = witness + scratch qubits.  Qubit 0 is the
// accept bit read out after applying v to witness (x) |0_scratch>; the
// scratch register occupies the qubits above the witness register.
struct VerifierCircuit {
  CMatrix v;
  int witness_qubits = 1;
  int scratch_qubits = 0;
  double completeness = 1.0;  // best witness acceptance probability
  double soundness = 0.0;     // worst-case bound below completeness
  std::string label;

  int total_qubits() const { return witness_qubits + scratch_qubits; }
  Eigen::Index dim() const { return Eigen::Index{1} << total_qubits(); }
};

// Unitarity within 1e-10, dimension match, positive completeness gap.
void validate_verifier(const VerifierCircuit& verifier);

// Q = I (x) |0><0| on the scratch register: the witness carries no
// leftover scratch entanglement.
Projector scratch_projector(const VerifierCircuit& verifier);

// R = V^dag (|1><1|_accept (x) I) V: states whose verification run accepts
// with certainty.  <psi|R|psi> is the acceptance probability of psi.
Projector accept_projector(const VerifierCircuit& verifier);

// Fixtures.  The identity verifier accepts exactly the states whose accept
// bit is already 1, so Q and R commute.  The rotation verifier entangles
// accept bit and scratch qubit: V = cos(theta) I - i sin(theta) Y_0 X_1,
// giving Jordan acceptance probabilities sin^2(theta) and cos^2(theta) on
// the scratch-clean subspace; theta in (0, pi/4).
VerifierCircuit identity_verifier(int witness_qubits, int scratch_qubits);
VerifierCircuit rotation_verifier(double theta);

// Recording count k = ceil(2 mu (1-mu) / eps^2), rounded up to odd.
int switch_count_for(double mu, double eps);

struct WitnessResult {
  std::optional<StateVector> state;  // empty on abort or retry exhaustion
  AmplificationReport report;        // output_energy carries the acceptance probability
  int recordings = 0;                // k actually used
};

// Witness preparation: start from accept-bit |1> (x) Haar-random rest,
// pulled back through V^dag into the image of R; attach the switch filter
// state at mu; run the recording circuit in reverse; then amplify "scratch
// and recording ancillas all zero" with the abort threshold 1/4^m.  On
// success the report carries the output's acceptance probability and the
// nearest exact Jordan eigenvalue.
WitnessResult prepare_witness(const VerifierCircuit& verifier, double mu, double eps,
                              std::uint64_t seed, const AmplificationOptions& opts = {});

// Same pipeline with the recording count chosen by the caller (odd).
WitnessResult prepare_witness_with_k(const VerifierCircuit& verifier, double mu, int k,
                                     std::uint64_t seed,
                                     const AmplificationOptions& opts = {});

// Inverse recording circuit applied to psi (x) |mu>_switch; psi lives on
// the front register the projectors act on.
StateVector apply_inverse_switch_circuit(const Projector& q, const Projector& r,
                                         const CVector& psi_front, double mu, int k,
                                         int qubit_cap = kDefaultQubitCap);

}  // namespace qfilt
