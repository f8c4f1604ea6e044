#pragma once

#include <cstdint>
#include <vector>

#include "qfilt/amplify.hpp"
#include "qfilt/filter.hpp"
#include "qfilt/operators.hpp"
#include "qfilt/state.hpp"
#include "qfilt/types.hpp"

namespace qfilt {

// One two-dimensional invariant subspace of a projector pair (Q, R):
// q1 spans image(Q) restricted to the block, q0 its kernel part, and
// likewise r1/r0 for R.  With p = <q1|R|q1> in (0,1) the stored vectors
// satisfy, exactly by construction,
//   q0 = sqrt(p) r0 - sqrt(1-p) r1
//   q1 = sqrt(1-p) r0 + sqrt(p) r1
//   r0 = sqrt(p) q0 + sqrt(1-p) q1
//   r1 = sqrt(p) q1 - sqrt(1-p) q0
// and Q q1 = q1, Q q0 = 0, R r1 = r1, R r0 = 0.
struct JordanBlock {
  double p = 0.0;
  CVector q0, q1, r0, r1;
  // p within [1e-8, 1e-7] of 0 or 1: kept as a block but numerically close
  // to the classification boundary.
  bool borderline = false;
};

// Canonical form of a projector pair: paired two-dimensional blocks plus
// the unpaired directions, which stay in the original dimension and are
// reported explicitly instead of being absorbed by an embedding.
struct JordanDecomposition {
  std::vector<JordanBlock> blocks;  // ordered by ascending p
  CMatrix fixed;   // orthonormal columns spanning image(Q) ∩ image(R)  (p = 1)
  CMatrix q_only;  // image(Q) ∩ kernel(R)  (p = 0 on the Q side)
  CMatrix r_only;  // image(R) ∩ kernel(Q)  (p = 0 on the R side)
  int rank_q = 0;  // = blocks + fixed + q_only columns
  int rank_r = 0;  // = blocks + fixed + r_only columns
  RVector qrq_spectrum;  // eigenvalues of QRQ restricted to image(Q), ascending
  RVector rqr_spectrum;  // eigenvalues of RQR restricted to image(R), ascending
};

// Eigensolve of QRQ on image(Q); r-vectors built from the block relations
// above (which pins the otherwise-arbitrary eigenvector phases), R-side
// spectrum from an independent eigensolve of RQR on image(R).
JordanDecomposition jordan_decompose(const Projector& q, const Projector& r);

// Max norm over the four exchange relations among the block's stored
// vectors (q0/q1 from r0/r1 and back); the construction keeps this at
// rounding error, so it gauges the decomposition's health.
double block_relation_residual(const JordanBlock& block);

// Largest gap between the matched nonzero eigenvalues of the QRQ and RQR
// restrictions, compared in descending order.  The two operators share
// their nonzero spectrum exactly, so this too is a pure numerics gauge.
double nonzero_spectrum_disagreement(const JordanDecomposition& decomposition);

// Residual overlap sum(w p^2) / sum(w p) left on the Q side after
// amplifying R from a Q-image state with weights w on directions of
// R-acceptance probability p.
double naive_overlap_formula(const std::vector<double>& weights,
                             const std::vector<double>& probs);

// Projector onto "phase estimation reads a label below the energy cutoff":
// forward estimate, keep accepted labels, undo the estimate.  Labels x with
// x/2^k < cutoff + 1e-12 are accepted, so grid-boundary phases count as
// below threshold.
class AcceptanceWindowProjector final : public ProjectorAction {
 public:
  AcceptanceWindowProjector(const PhaseEstimation& engine, double cutoff);

  void project(StateVector& state) const override;
  const std::vector<char>& accepted() const { return accepted_; }

 private:
  const PhaseEstimation& engine_;
  std::vector<char> accepted_;
};

struct NaiveDemoResult {
  double residual_overlap = 0.0;      // measured zero-ancilla weight after collapsing onto R
  double predicted = 0.0;             // closed-form residual from weights and p values
  double r_overlap = 0.0;             // ||R psi0||^2 of the initial state
  long iterations = 0;                // Grover rounds applied before the collapse
  double collapse_probability = 0.0;  // ||R psi_m||^2 at the forced measurement
  std::vector<double> weights;        // |<phi_a|psi>|^2 per eigenstate
  std::vector<double> p_values;       // acceptance probability per eigenstate
};

// End-to-end demonstration that amplifying the acceptance projector R and
// then asking for clean ancillas leaves only sum(w p^2)/sum(w p) of the
// weight: normalizes H, runs Grover against R from a random zero-ancilla
// state with a single k-bit estimation register, collapses onto R, and
// measures the zero-ancilla weight of the survivor.  `energy_cutoff` is in
// normalized spectrum units.
NaiveDemoResult run_naive_demo(const HermitianOperator& h, double energy_cutoff, int k,
                               std::uint64_t seed, double margin = 0.125);

}  // namespace qfilt
