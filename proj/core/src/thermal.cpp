#include "qfilt/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qfilt/errors.hpp"

namespace qfilt {

DensityOfStates estimate_dos(const HermitianOperator& h, double eps, std::uint64_t seed,
                             const DosOptions& opts) {
  if (opts.bins < 2) throw ValidationError("density-of-states grid needs at least two bins");
  if (opts.averaging_seeds < 1)
    throw ValidationError("density-of-states estimate needs at least one seed");
  const Eigen::Index dim = h.dim();
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;

  DensityOfStates dos;
  dos.system_qubits = n;
  dos.spec = select_filter_params(eps, n, 0.5, opts.qubit_cap);
  auto [h_norm, map] = normalize_spectrum(h, opts.margin);
  dos.map = map;

  const double lo = opts.margin;
  const double step = (1.0 - 2.0 * opts.margin) / static_cast<double>(opts.bins - 1);
  if (step < filter_resolution(dos.spec.k, dos.spec.eta))
    throw ValidationError("grid step is finer than the filter resolution");
  dos.grid.resize(opts.bins);
  for (int b = 0; b < opts.bins; ++b) dos.grid[b] = lo + step * static_cast<double>(b);

  const SpectralDecomposition spec = spectral_decompose(h_norm);
  dos.exact_counts = RVector::Zero(opts.bins);
  for (Eigen::Index a = 0; a < dim; ++a) {
    Eigen::Index nearest = 0;
    (dos.grid.array() - spec.eigenvalues[a]).abs().minCoeff(&nearest);
    dos.exact_counts[nearest] += 1.0;
  }

  // Averaged random-state weights in the eigenbasis.
  const RngStream root(seed);
  RVector mean_weights = RVector::Zero(dim);
  RegisterLayout system_only{n, 0, 0, 0, opts.qubit_cap};
  for (int s = 0; s < opts.averaging_seeds; ++s) {
    RngStream child = root.split(static_cast<std::uint64_t>(s));
    const StateVector psi = random_state(system_only, child);
    const CVector coeffs = spec.eigenvectors.adjoint() * psi.amp;
    mean_weights += coeffs.cwiseAbs2();
  }
  mean_weights /= static_cast<double>(opts.averaging_seeds);

  const double big_n = static_cast<double>(dim);
  dos.estimated = RVector::Zero(opts.bins);
  for (int b = 0; b < opts.bins; ++b) {
    double q = 0.0;
    for (Eigen::Index a = 0; a < dim; ++a)
      q += mean_weights[a] *
           std::pow(std::norm(momentum_overlap(spec.eigenvalues[a], dos.grid[b], dos.spec.k)),
                    dos.spec.eta);
    dos.estimated[b] = std::clamp(2.0 * big_n * q, 0.0, big_n);
  }
  return dos;
}

int sample_energy(const DensityOfStates& dos, double temperature, RngStream& rng,
                  bool positive_exponent, bool use_estimated) {
  if (dos.grid.size() == 0) throw ValidationError("density of states is empty");
  if (!(temperature > 0.0)) throw ValidationError("temperature must be positive");
  const RVector& counts = use_estimated ? dos.estimated : dos.exact_counts;
  if (counts.size() != dos.grid.size())
    throw ValidationError("density of states counts do not match the grid");

  // Shift by the dominant occupied energy so the top weight is exp(0).
  const double sign = positive_exponent ? 1.0 : -1.0;
  double ref = 0.0;
  bool any = false;
  for (Eigen::Index b = 0; b < counts.size(); ++b) {
    if (counts[b] <= 0.0) continue;
    const double s = sign * dos.grid[b];
    if (!any || s > ref) ref = s;
    any = true;
  }
  if (!any) throw ValidationError("density of states has no occupied bin");

  std::vector<double> weights(static_cast<std::size_t>(counts.size()), 0.0);
  double total = 0.0;
  for (Eigen::Index b = 0; b < counts.size(); ++b) {
    if (counts[b] <= 0.0) continue;
    weights[static_cast<std::size_t>(b)] =
        counts[b] * std::exp((sign * dos.grid[b] - ref) / temperature);
    total += weights[static_cast<std::size_t>(b)];
  }
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t b = 0; b < weights.size(); ++b) {
    acc += weights[b];
    if (u < acc) return static_cast<int>(b);
  }
  for (std::size_t b = weights.size(); b-- > 0;)
    if (weights[b] > 0.0) return static_cast<int>(b);
  throw NumericsError("energy sampling failed to select a bin");
}

ThermalResult prepare_thermal_state(const HermitianOperator& h, double temperature,
                                    double eps, std::uint64_t seed,
                                    const ThermalOptions& opts) {
  if (!(temperature >= kMinTemperature))
    throw ValidationError("temperature is below the supported minimum");
  if (opts.max_resamples < 0) throw ValidationError("resample budget must be non-negative");

  DosOptions dos_opts;
  dos_opts.bins = opts.bins;
  dos_opts.averaging_seeds = opts.averaging_seeds;
  dos_opts.margin = opts.prep.margin;
  dos_opts.qubit_cap = opts.prep.qubit_cap;

  const RngStream root(seed);
  ThermalResult result;
  result.dos = estimate_dos(h, eps, root.split(0).key(), dos_opts);
  RngStream sampler = root.split(1);

  for (int attempt = 0;; ++attempt) {
    const int bin = sample_energy(result.dos, temperature, sampler, opts.positive_exponent,
                                  opts.sample_from_estimate);
    const double mu = result.dos.grid[bin];
    PreparationResult prep =
        prepare_filtered_state(h, mu, eps, root.split(2 + attempt).key(), opts.prep);
    result.report = prep.report;
    result.bin = bin;
    result.chosen_energy_normalized = mu;
    result.chosen_energy = result.dos.map.inverse(mu);
    if (prep.report.succeeded) {
      result.state = std::move(prep.state);
      result.resamples = attempt;
      return result;
    }
    if (attempt >= opts.max_resamples) {
      result.resamples = attempt;
      return result;
    }
  }
}

}  // namespace qfilt
