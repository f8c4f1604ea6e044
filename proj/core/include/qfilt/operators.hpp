#pragma once

#include <cstddef>
#include <string>

#include "qfilt/rng.hpp"
#include "qfilt/state.hpp"
#include "qfilt/types.hpp"

namespace qfilt {

// Dense diagonalization refuses matrices beyond this dimension unless a
// larger cap is passed explicitly.
inline constexpr std::size_t kDefaultSpectralCap = std::size_t{1} << 12;

// Hermitian matrix with a human-readable label for reports.
struct HermitianOperator {
  CMatrix matrix;
  std::string label;

  Eigen::Index dim() const { return matrix.rows(); }
};

// Validated orthogonal projector; rank is fixed at construction from the
// trace.  Use make_projector to build one from a raw matrix.
struct Projector {
  CMatrix matrix;
  int rank = 0;
};

Projector make_projector(CMatrix m);

// Eigenvalues ascending.  Eigenvector columns carry a canonical phase: the
// first entry of largest magnitude (ties within 1e-12 resolved by lowest
// index) is made real and positive, so repeated decompositions of the same
// matrix agree exactly.  Degenerate subspaces keep the solver's
// deterministic basis.
struct SpectralDecomposition {
  RVector eigenvalues;
  CMatrix eigenvectors;

  CMatrix reconstruct() const;
};

void check_hermitian(const CMatrix& m, double tol = 1e-10);
void check_projector(const CMatrix& p, double tol = 1e-10);
int projector_rank(const CMatrix& p);

void canonicalize_phases(CMatrix& vectors);

SpectralDecomposition spectral_decompose(const CMatrix& h,
                                         std::size_t cap = kDefaultSpectralCap);
SpectralDecomposition spectral_decompose(const HermitianOperator& op,
                                         std::size_t cap = kDefaultSpectralCap);

// Haar-distributed unitary (Ginibre draw + QR with the R-diagonal phase fix).
CMatrix random_unitary(int dim, RngStream& rng);
// Rank-`rank` projector onto a Haar-random subspace.
Projector random_projector(int dim, int rank, RngStream& rng);

// <state|op|state> for a Hermitian op acting on the full state or, when
// op is smaller, on the lowest qubits (op dimension must divide the state
// dimension).  A residual imaginary part above 1e-10 is a hard error.
double expectation_value(const StateVector& state, const CMatrix& op);
double expectation_value(const StateVector& state, const HermitianOperator& op);

struct MeasurementOutcome {
  int outcome = 0;          // 1 = landed in the projector's image
  double probability = 0.0; // exact pre-measurement ||P psi||^2
};

// Projective measurement of p (full-state or front-register sized): draws
// the outcome from <p>, collapses and renormalizes in place.
MeasurementOutcome measure_projector(StateVector& state, const CMatrix& p, RngStream& rng);
MeasurementOutcome measure_projector(StateVector& state, const Projector& p, RngStream& rng);

}  // namespace qfilt
