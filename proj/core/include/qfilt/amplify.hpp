#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "qfilt/filter.hpp"
#include "qfilt/hamiltonians.hpp"
#include "qfilt/operators.hpp"
#include "qfilt/rng.hpp"
#include "qfilt/state.hpp"

namespace qfilt {

// Target of an amplitude-amplification run, exposed through the three
// primitives the Grover loop needs.  Implementations may exploit structure
// (the all-zero-tail projector touches no matrix at all); the generic
// defaults work for any idempotent `project`.
class ProjectorAction {
 public:
  virtual ~ProjectorAction() = default;

  virtual void project(StateVector& state) const = 0;  // psi <- P psi, no renorm
  virtual double overlap(const StateVector& state) const;      // ||P psi||^2
  virtual void reflect(StateVector& state) const;              // psi <- (I-2P) psi
  virtual void project_complement(StateVector& state) const;   // psi <- (I-P) psi
};

// "Qubits >= prefix_qubits are all |0>" — the contiguous index prefix.
class ZeroTailProjector final : public ProjectorAction {
 public:
  explicit ZeroTailProjector(int prefix_qubits) : prefix_qubits_(prefix_qubits) {}
  int prefix_qubits() const { return prefix_qubits_; }

  void project(StateVector& state) const override;
  double overlap(const StateVector& state) const override;
  void reflect(StateVector& state) const override;
  void project_complement(StateVector& state) const override;

 private:
  int prefix_qubits_;
};

// Explicit projector matrix applied to the lowest log2(rows) qubits.
class MatrixProjector final : public ProjectorAction {
 public:
  explicit MatrixProjector(const Projector& p);
  explicit MatrixProjector(CMatrix matrix);

  void project(StateVector& state) const override;

 private:
  CMatrix matrix_;
};

// ||Q Phi||^2 from the simulated state; the classical stand-in for
// counting the in-band weight.
double compute_overlap(const StateVector& state, const ProjectorAction& target);
double compute_overlap(const StateVector& state, const Projector& target);

// Iteration count m = max(0, round(pi/(4 theta) - 1/2)) with
// theta = asin(sqrt(q)); after m rounds the success probability is
// sin^2((2m+1) theta).  Rounding is round-half-to-even, so q = 1/2 gives
// m = 0 and leans on the retry loop.  Throws UndefinedAmplificationError
// at q = 0 (an abort should already have happened).
long grover_iterations(double q);

struct AmplificationOptions {
  int max_retries = 8;
  // Multiplicative error applied to the measured overlap before choosing
  // iteration counts; studies robustness of the schedule, never touches
  // the simulated dynamics.
  double overlap_noise = 0.0;
  // Spectrum normalization margin delta; eigenvalues land in [delta, 1-delta].
  double margin = 0.125;
  int qubit_cap = kDefaultQubitCap;
};

struct AmplificationReport {
  double q = 0.0;          // ||Q Phi||^2 before amplification
  long iterations = 0;     // total Grover rounds applied across attempts
  int retries = 0;         // failed target measurements
  bool aborted = false;    // q < 1/N^2
  bool succeeded = false;  // final measurement landed in the target
  double m_hat = 0.0;      // in-band eigenstate estimate 2Nq, clipped to [0, N]
  double success_probability = 0.0;  // predicted for the last attempt made
  bool premises_met = true;          // phase-bit/block-count rules satisfied
  // Filled by the preparation pipelines; NaN when not applicable.
  double output_energy = std::numeric_limits<double>::quiet_NaN();             // original units
  double output_energy_normalized = std::numeric_limits<double>::quiet_NaN();  // in [0,1]
  double energy_exact_nearest = std::numeric_limits<double>::quiet_NaN();      // original units
};

// Grover amplification of `target` starting from `state`, which is also the
// reflection axis.  Aborts (state untouched) when the overlap is below
// 1/big_n^2.  Otherwise runs m rounds of (reflect about the initial state)
// after (reflect about the target image), measures the target, and on
// failure re-derives the remaining rotation from the collapsed in-plane
// state and tries again, up to max_retries.  On success the state is the
// collapsed, renormalized target component.
AmplificationReport amplify(StateVector& state, const ProjectorAction& target,
                            std::size_t big_n, const AmplificationOptions& opts,
                            RngStream& rng);

struct PreparationResult {
  std::optional<StateVector> state;  // empty on abort or retry exhaustion
  AmplificationReport report;
  FilterSpec spec;  // parameters actually used
  SpectrumMap map;  // normalized <-> original units
};

// Full pipeline: normalize the spectrum, draw a Haar-random system state,
// filter it at center mu / bandwidth eps, abort-check, amplify the all-zero
// ancilla block, and report energies in original units.
PreparationResult prepare_filtered_state(const HermitianOperator& h, double mu, double eps,
                                         std::uint64_t seed,
                                         const AmplificationOptions& opts = {});
// Same pipeline with explicitly chosen filter parameters; premises_met
// records whether they satisfy the selection rules for their eps.
PreparationResult prepare_filtered_state(const HermitianOperator& h, const FilterSpec& spec,
                                         std::uint64_t seed,
                                         const AmplificationOptions& opts = {});

struct SweepEntry {
  double mu = 0.0;
  AmplificationReport report;
};

struct SweepResult {
  std::vector<SweepEntry> trace;
  std::optional<std::size_t> first_success_index;
  std::optional<double> ground_energy;             // original units
  std::optional<double> ground_energy_normalized;  // in [0,1]
  FilterSpec spec;                                 // k/eta used for the step size
};

// Steps mu across the normalized window [delta, 1-delta] in increments of
// the filter resolution 2^{-k}/(2 pi sqrt(eta)); the first success is the
// ground-energy estimate.  Each mu value owns a split RNG stream, so the
// trace is deterministic in the seed and independent of evaluation order.
SweepResult sweep_mu(const HermitianOperator& h, double eps, std::uint64_t seed,
                     const AmplificationOptions& opts = {});

}  // namespace qfilt
