#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qfilt/operators.hpp"
#include "qfilt/types.hpp"

namespace qfilt {

// Ising data in the {0,1} spin convention: E(sigma) = sum_i h_i sigma_i +
// sum_{i<j} J_ij sigma_i sigma_j.  The all-zero configuration always has
// energy zero.
struct IsingParams {
  std::vector<double> fields;                          // h_i, one per site (empty = all zero)
  std::vector<std::tuple<int, int, double>> couplings; // (i, j, J_ij) with i < j
};

// Model selection as it appears in experiment configs.
struct ModelSpec {
  std::string kind;          // classical-ising | transverse-ising | random-two-local
  int qubits = 0;
  IsingParams ising;
  double transverse = 0.0;   // field strength for transverse-ising
  std::uint64_t seed = 0;    // draw seed for random-two-local
};

double classical_energy(const IsingParams& params, int n, std::size_t config);

// Diagonal in the computational basis.
HermitianOperator build_classical_ising(int n, const IsingParams& params);
// Classical part plus gamma * sum_i X_i.
HermitianOperator build_transverse_ising(int n, const IsingParams& params, double gamma);
// Sum over all site pairs of independent GUE-distributed two-site terms;
// deterministic for a fixed seed.
HermitianOperator build_random_two_local(int n, std::uint64_t seed);

HermitianOperator build_model(const ModelSpec& spec);

// Invertible affine map of energies used to place a spectrum strictly
// inside the phase-estimation window.
struct SpectrumMap {
  double scale = 1.0;
  double offset = 0.0;

  double forward(double e) const { return scale * e + offset; }
  double inverse(double e) const { return (e - offset) / scale; }
};

// Maps the exact [min, max] eigenvalue range onto [margin, 1 - margin].
// A spectrum of zero width (max - min < 1e-12) keeps scale 1 and is offset
// onto 1/2.  Returns the remapped operator and the map applied.
std::pair<HermitianOperator, SpectrumMap> normalize_spectrum(const HermitianOperator& op,
                                                             double margin = 0.125);

}  // namespace qfilt
