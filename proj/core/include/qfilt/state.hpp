#pragma once

#include <cstddef>
#include <cstdint>

#include "qfilt/layout.hpp"
#include "qfilt/rng.hpp"
#include "qfilt/types.hpp"

namespace qfilt {

// Dense state vector over the composite register described by `layout`.
// Unit norm (within 1e-12) is the class invariant; every operation here
// either preserves the norm exactly or renormalizes before returning.
struct StateVector {
  RegisterLayout layout;
  CVector amp;

  // Compensated summation: at multi-million dimensions a naive sum's own
  // rounding is visible at the 1e-12 scale this class's contract uses.
  double norm() const;
  void normalize();

  // Throws NumericsError if the norm has drifted beyond 1e-12 from one.
  void check_norm() const;
};

// |index> on the given layout.
StateVector basis_state(const RegisterLayout& layout, std::size_t index);

// State with amplitudes drawn from the rotation-invariant (Haar) measure:
// i.i.d. complex Gaussians, then normalized.
StateVector random_state(const RegisterLayout& layout, RngStream& rng);
StateVector random_state(const RegisterLayout& layout, std::uint64_t seed);

Complex inner_product(const StateVector& a, const StateVector& b);

// --- register-structured operations --------------------------------------
//
// All of these act in place and preserve the norm (unitaries) or are used
// by callers that renormalize (projections).

// Apply a square matrix to the lowest log2(m.rows()) qubits.  The state,
// viewed column-major as a (front x rest) matrix, is multiplied by m on the
// left; m.rows() must divide the state dimension.
void apply_front_matrix(StateVector& state, const CMatrix& m);

// Apply a 2^b x 2^b matrix to the b qubits starting at `offset_qubits`.
void apply_block_matrix(StateVector& state, const CMatrix& m, int offset_qubits);

// Apply a single-qubit gate to qubit `qubit`.
void apply_single_qubit(StateVector& state, const Eigen::Matrix2cd& g, int qubit);

// Hadamard on every qubit of ancilla block `block`.
void apply_hadamard_block(StateVector& state, int block);

// --- all-zero tail helpers -------------------------------------------------
//
// The projector "qubits >= n_low are all |0>" selects the contiguous index
// prefix [0, 2^n_low); these helpers exploit that.

// ||P psi||^2 for the zero-tail projector with the given prefix qubit count.
double zero_tail_overlap(const StateVector& state, int prefix_qubits);

// psi <- P psi (no renormalization).
void zero_tail_project(StateVector& state, int prefix_qubits);

// psi <- (I - 2P) psi.
void zero_tail_reflect(StateVector& state, int prefix_qubits);

// psi <- 2<ref|psi>|ref> - psi  (reflection about a fixed state).
void reflect_about(StateVector& state, const StateVector& ref);

}  // namespace qfilt
