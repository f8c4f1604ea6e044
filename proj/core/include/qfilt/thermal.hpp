#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "qfilt/amplify.hpp"
#include "qfilt/filter.hpp"
#include "qfilt/hamiltonians.hpp"
#include "qfilt/rng.hpp"
#include "qfilt/state.hpp"

namespace qfilt {

// Floor on the sampling temperature (normalized energy units, Boltzmann
// constant absorbed); stands in for the usual inverse-polynomial bound.
inline constexpr double kMinTemperature = 1e-3;

// Density of states over an ascending grid of normalized energy centers:
// the oracle histogram next to the filter-overlap estimate.
struct DensityOfStates {
  RVector grid;          // bin centers in [margin, 1-margin]
  RVector exact_counts;  // nearest-center histogram of the spectrum; sums to N
  RVector estimated;     // m-hat per bin: 2N x averaged overlap, clipped to [0, N]
  FilterSpec spec;       // (k, eta, eps) used by the estimator
  SpectrumMap map;       // normalized <-> original energy units
  int system_qubits = 0;
};

struct DosOptions {
  int bins = 17;
  int averaging_seeds = 8;  // random-state draws averaged per bin
  double margin = 0.125;
  int qubit_cap = kDefaultQubitCap;
};

// Filter-overlap estimate of the density of states: for each bin center mu,
// the zero-ancilla overlap of the filtered random state, averaged over
// seeds, scaled by 2N, and clipped to [0, N].  The overlap is evaluated in
// closed form (sum of weight x |<phi_a|mu>|^(2 eta)), which equals the
// state-vector overlap exactly.  The grid step must be at least the filter
// resolution.
DensityOfStates estimate_dos(const HermitianOperator& h, double eps, std::uint64_t seed,
                             const DosOptions& opts = {});

// Gibbs-weighted bin draw: probability proportional to
// exp(-grid_b / T) * exact_counts_b (or exp(+grid_b / T) with the
// positive-exponent flag, matching the source text's printed sign).
// Energies are shifted by the dominant occupied bin before exponentiating,
// so extreme T/energy ratios cannot underflow every weight.
int sample_energy(const DensityOfStates& dos, double temperature, RngStream& rng,
                  bool positive_exponent = false, bool use_estimated = false);

struct ThermalOptions {
  int bins = 17;
  int averaging_seeds = 8;
  int max_resamples = 32;  // aborted preparations trigger a fresh energy draw
  bool positive_exponent = false;
  bool sample_from_estimate = false;
  AmplificationOptions prep;  // margin/cap/retry knobs for the preparation
};

struct ThermalResult {
  std::optional<StateVector> state;  // empty when every resample failed
  AmplificationReport report;        // from the final preparation attempt
  DensityOfStates dos;               // the estimate the sampler drew from
  int bin = -1;
  double chosen_energy = std::numeric_limits<double>::quiet_NaN();  // original units
  double chosen_energy_normalized = std::numeric_limits<double>::quiet_NaN();
  int resamples = 0;  // failed preparation attempts before the final one
};

// Ensemble realization of the Gibbs distribution: estimate the density of
// states, draw an energy at the given temperature, and prepare a filtered
// state at that energy; aborted preparations resample the energy (an abort
// says the drawn bin's weight was missing from this particular random
// state, so drawing again is consistent).
ThermalResult prepare_thermal_state(const HermitianOperator& h, double temperature,
                                    double eps, std::uint64_t seed,
                                    const ThermalOptions& opts = {});

}  // namespace qfilt
