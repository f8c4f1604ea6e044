#pragma once

#include <cstdint>
#include <string>

#include "qfilt/layout.hpp"
#include "qfilt/state.hpp"
#include "qfilt/types.hpp"

namespace qfilt {

// Adjacent-pair statistics of a k-bit outcome string j (bit b of the index
// is the (b+1)-th recorded outcome).
struct SwitchStats {
  int switches = 0;    // adjacent unequal pairs
  int zero_pairs = 0;  // adjacent 00 pairs
};

// Counts over the k-1 interior pairs (j_1,j_2)...(j_{k-1},j_k).
SwitchStats switch_stats(std::uint64_t j, int k);

// Counts over the k pairs of the extended string (1, j_1, ..., j_k): the
// recording chain starts from the projector-image side, which behaves as a
// leading 1 outcome, so the first recording contributes a switch when
// j_1 = 0.  These are the counts entering every closed-form amplitude; the
// zero-pair count is unchanged by the extension.
SwitchStats outcome_stats(std::uint64_t j, int k);

// Signed closed-form recording amplitudes for acceptance probability p:
// entry j is (sqrt(p))^(k-s) * (sqrt(1-p))^s * (-1)^l with (s, l) the
// extended outcome_stats.  The squared entries sum to one exactly (each
// extended pair contributes p or 1-p, a probability chain).
RVector outcome_amplitudes(double p, int k);

// k-qubit filter state centered at acceptance probability mu: the
// amplitudes above, explicitly normalized.  k must be odd.
struct SwitchFilterState {
  double mu = 0.5;
  int k = 1;
  CVector amplitudes;
};

SwitchFilterState switch_filter_state(double mu, int k);

// Alternating coherent recordings of two projectors on the front register:
// recording t applies P (x) X_t + (I-P) (x) I with P = R for even t and
// P = Q for odd t, writing onto ancilla qubit t.  k odd puts R at both
// ends.  Each recording is a self-adjoint involution, so the inverse
// circuit is the same recordings in reverse order.
class SwitchCircuit {
 public:
  // q and r act on the front system+scratch register; the layout appends k
  // single-qubit ancillas.
  SwitchCircuit(CMatrix q, CMatrix r, int system_qubits, int scratch_qubits, int k,
                int qubit_cap = kDefaultQubitCap);

  const RegisterLayout& layout() const { return layout_; }
  int recordings() const { return layout_.ancilla_blocks; }

  void apply_forward(StateVector& state) const;
  void apply_inverse(StateVector& state) const;

 private:
  void apply_recording(StateVector& state, int t) const;

  RegisterLayout layout_;
  CMatrix q_, r_;
};

// --- the switch-counting filter function ----------------------------------
//
// g(p, mu, k) is the amplitude the inverse recording circuit leaves on the
// clean-ancilla image-side vector of a Jordan block with acceptance
// probability p, when fed the block's R-side vector together with the
// filter state at mu.  Exact enumeration over the outcome strings whose
// final recording reads 1 is the authoritative definition.

double g_filter(double p, double mu, int k);

// Transfer-matrix closed form ((A^k + B^k)/2 with A = x + y, B = x - y,
// x = sqrt(p mu), y = sqrt((1-p)(1-mu))); algebraically identical to the
// enumeration and usable at k far beyond enumeration range.
double g_filter_closed(double p, double mu, int k);

// Companion forms with documented status:
//  - binomial: sum over even switch counts of C(k, 2l) x^{k-2l} y^{2l};
//    equals the closed form exactly.
//  - adjacent_count: sum over C(k-1, s) x^{k-s} y^s = x (x+y)^{k-1}, the
//    count of final-1 strings by interior switches; differs from the
//    enumeration because the first recording also carries a switch factor.
//  - gaussian: (1/2) exp(-(p-mu)^2 / (2 eps^2)) with eps^2 = 2 mu(1-mu)/k,
//    the bandwidth rule inverted; an approximation, not a contract.
double g_filter_binomial(double p, double mu, int k);
double g_filter_adjacent_count(double p, double mu, int k);
double g_filter_gaussian(double p, double mu, int k);

// Empirical variance of g_filter(. , mu, k) as a distribution over p,
// measured on a fine grid, and the nearest of three candidate scalings.
// Recorded, not asserted: the candidates disagree in the source material.
struct FilterVarianceReport {
  double empirical = 0.0;
  double candidate_k2 = 0.0;      // 2 mu (1-mu) / k^2
  double candidate_k = 0.0;       // 2 mu (1-mu) / k
  double candidate_4k = 0.0;      // 4 mu (1-mu) / k
  std::string nearest;            // label of the closest candidate
};

FilterVarianceReport measure_filter_variance(double mu, int k, int grid_points = 2001);

}  // namespace qfilt
