#include "qfilt/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qfilt/errors.hpp"
#include "qfilt/rng.hpp"

namespace qfilt {

namespace {
constexpr double kPi = std::numbers::pi;
}

CVector momentum_state(double mu, int k) {
  if (k < 1) throw ValidationError("momentum state needs at least one qubit");
  if (!(mu >= 0.0 && mu < 1.0)) throw ValidationError("momentum phase must lie in [0, 1)");
  const auto dim = Eigen::Index{1} << k;
  CVector v(dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double angle = -2.0 * kPi * mu * static_cast<double>(j);
    v[j] = norm * Complex(std::cos(angle), std::sin(angle));
  }
  return v;
}

Complex momentum_overlap(double phi, double mu, int k) {
  if (k < 1) throw ValidationError("momentum overlap needs at least one qubit");
  const double delta = phi - mu;
  const double m = static_cast<double>(Eigen::Index{1} << k);
  const double s = std::sin(kPi * delta);
  if (std::abs(s) < 1e-14) return Complex(1.0, 0.0);  // phases coincide mod 1
  const double mag = std::sin(kPi * m * delta) / (m * s);
  const double angle = kPi * (m - 1.0) * delta;
  return mag * Complex(std::cos(angle), std::sin(angle));
}

double circle_distance(double a, double b) {
  double r = std::fmod(std::abs(a - b), 1.0);
  return std::min(r, 1.0 - r);
}

double overlap_upper_bound(double phi, double mu, int k) {
  const double d = circle_distance(phi, mu);
  if (d < 1e-300) return std::numeric_limits<double>::infinity();
  return 1.0 / (std::ldexp(2.0, k) * d);  // 2^{k+1} d
}

double filter_resolution(int k, int eta) {
  if (k < 1 || eta < 1) throw ValidationError("filter resolution needs k >= 1 and eta >= 1");
  return std::ldexp(1.0, -k) / (2.0 * kPi * std::sqrt(static_cast<double>(eta)));
}

FilterSpec select_filter_params(double eps, int n, double mu, int qubit_cap) {
  if (!(eps > 0.0 && eps < 0.5))
    throw ValidationError("filter bandwidth must lie strictly inside (0, 1/2)");
  if (!(mu > 0.0 && mu < 1.0)) throw ValidationError("filter center must lie in (0, 1)");
  if (n < 1) throw ValidationError("system register must have at least one qubit");
  const double logeps = std::log2(1.0 / eps);
  const int k = static_cast<int>(std::ceil(2.0 * logeps));
  const int eta1 = static_cast<int>(std::ceil(1.0 + (n + 1.0) / logeps));
  const int eta2 = static_cast<int>(std::ceil(1.0 + (n + std::log2(mu)) / logeps));
  const int eta = std::max({eta1, eta2, 1});
  const long total = static_cast<long>(n) + static_cast<long>(eta) * k;
  if (total > qubit_cap)
    throw CapacityError("filter budget n=" + std::to_string(n) + ", k=" + std::to_string(k) +
                        ", eta=" + std::to_string(eta) + " needs " + std::to_string(total) +
                        " qubits, cap is " + std::to_string(qubit_cap));
  return FilterSpec{mu, eps, k, eta};
}

PhaseEstimation::PhaseEstimation(const HermitianOperator& h_normalized, int k, int eta,
                                 int qubit_cap) {
  if (k < 1 || eta < 1) throw ValidationError("phase estimation needs k >= 1 and eta >= 1");
  const Eigen::Index dim = h_normalized.dim();
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim)
    throw ValidationError("Hamiltonian dimension must be a power of two");
  layout_ = RegisterLayout{n, 0, eta, k, qubit_cap};
  layout_.validate();
  spectrum_ = spectral_decompose(h_normalized);
  const double lo = spectrum_.eigenvalues.minCoeff();
  const double hi = spectrum_.eigenvalues.maxCoeff();
  if (!(lo > 0.0 && hi < 1.0))
    throw ValidationError("eigenvalues must lie strictly inside (0, 1); normalize the spectrum first");

  const auto labels = Eigen::Index{1} << k;
  phase_table_.resize(dim, labels);
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index j = 0; j < labels; ++j) {
      const double angle = -2.0 * kPi * spectrum_.eigenvalues[a] * static_cast<double>(j);
      phase_table_(a, j) = Complex(std::cos(angle), std::sin(angle));
    }
  readout_.resize(labels, labels);
  const double norm = 1.0 / std::sqrt(static_cast<double>(labels));
  for (Eigen::Index x = 0; x < labels; ++x)
    for (Eigen::Index j = 0; j < labels; ++j) {
      const double angle = 2.0 * kPi * static_cast<double>(x) * static_cast<double>(j) /
                           static_cast<double>(labels);
      readout_(x, j) = norm * Complex(std::cos(angle), std::sin(angle));
    }
}

void PhaseEstimation::apply_phase_kickback(StateVector& state, bool inverse) const {
  if (state.amp.size() != static_cast<Eigen::Index>(layout_.dimension()))
    throw ValidationError("state does not match the phase-estimation layout");
  apply_front_matrix(state, spectrum_.eigenvectors.adjoint());
  const std::size_t d = layout_.dimension();
  const std::size_t front_mask = layout_.front_dimension() - 1;
  const std::size_t label_mask = (std::size_t{1} << layout_.block_qubits) - 1;
  for (int b = 0; b < layout_.ancilla_blocks; ++b) {
    const int off = layout_.block_offset(b);
    for (std::size_t i = 0; i < d; ++i) {
      const auto a = static_cast<Eigen::Index>(i & front_mask);
      const auto j = static_cast<Eigen::Index>((i >> off) & label_mask);
      const Complex f = phase_table_(a, j);
      state.amp[static_cast<Eigen::Index>(i)] *= inverse ? std::conj(f) : f;
    }
  }
  apply_front_matrix(state, spectrum_.eigenvectors);
}

void PhaseEstimation::apply_block_hadamards(StateVector& state) const {
  for (int b = 0; b < layout_.ancilla_blocks; ++b) apply_hadamard_block(state, b);
}

void PhaseEstimation::apply_readout(StateVector& state, bool inverse) const {
  CMatrix op = readout_;
  if (inverse) op = readout_.adjoint();
  for (int b = 0; b < layout_.ancilla_blocks; ++b)
    apply_block_matrix(state, op, layout_.block_offset(b));
}

void PhaseEstimation::apply_forward(StateVector& state) const {
  apply_block_hadamards(state);
  apply_phase_kickback(state, false);
  apply_readout(state, false);
}

void PhaseEstimation::apply_inverse(StateVector& state) const {
  apply_readout(state, true);
  apply_phase_kickback(state, true);
  apply_block_hadamards(state);
}

void PhaseEstimation::apply_filter_inverse(StateVector& state) const {
  apply_phase_kickback(state, true);
  apply_block_hadamards(state);
}

StateVector PhaseEstimation::momentum_input(const CVector& psi_system, double mu) const {
  if (psi_system.size() != static_cast<Eigen::Index>(layout_.front_dimension()))
    throw ValidationError("system state does not match the layout");
  if (std::abs(psi_system.norm() - 1.0) > 1e-12)
    throw ValidationError("system state must be normalized");
  const CVector mom = momentum_state(mu, layout_.block_qubits);
  const std::size_t d = layout_.dimension();
  const std::size_t front_mask = layout_.front_dimension() - 1;
  const std::size_t label_mask = (std::size_t{1} << layout_.block_qubits) - 1;
  StateVector s{layout_, CVector(static_cast<Eigen::Index>(d))};
  for (std::size_t i = 0; i < d; ++i) {
    Complex v = psi_system[static_cast<Eigen::Index>(i & front_mask)];
    for (int b = 0; b < layout_.ancilla_blocks; ++b)
      v *= mom[static_cast<Eigen::Index>((i >> layout_.block_offset(b)) & label_mask)];
    s.amp[static_cast<Eigen::Index>(i)] = v;
  }
  return s;
}

StateVector PhaseEstimation::filtered_state(const CVector& psi_system, double mu) const {
  StateVector s = momentum_input(psi_system, mu);
  apply_filter_inverse(s);
  s.check_norm();
  return s;
}

StateVector apply_inverse_phase_estimation(const HermitianOperator& h_normalized,
                                           const CVector& psi_system, const FilterSpec& spec) {
  const PhaseEstimation engine(h_normalized, spec.k, spec.eta);
  return engine.filtered_state(psi_system, spec.mu);
}

std::vector<BoundCheckRow> check_momentum_bounds(int k_min, int k_max,
                                                 std::size_t points_per_k,
                                                 std::uint64_t seed) {
  if (k_min < 1 || k_max < k_min) throw ValidationError("bad phase-bit range for bound check");
  std::vector<BoundCheckRow> rows;
  for (int k = k_min; k <= k_max; ++k) {
    const auto side = static_cast<std::size_t>(std::sqrt(static_cast<double>(points_per_k)));
    BoundCheckRow row{k, side * side, 0.0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < side; ++i)
      for (std::size_t j = 0; j < side; ++j) {
        const double phi = static_cast<double>(i) / static_cast<double>(side);
        const double mu = static_cast<double>(j) / static_cast<double>(side);
        const double bound = overlap_upper_bound(phi, mu, k);
        if (std::isinf(bound)) continue;
        row.max_upper_violation =
            std::max(row.max_upper_violation, std::abs(momentum_overlap(phi, mu, k)) - bound);
      }
    RngStream rng(seed + static_cast<std::uint64_t>(k));
    const std::size_t draws = std::max<std::size_t>(100, points_per_k / 100);
    for (std::size_t t = 0; t < draws; ++t) {
      const int eta = 1 + static_cast<int>(rng.next_u64() % 16);
      const double mu = rng.uniform();
      const double delta = (2.0 * rng.uniform() - 1.0) * filter_resolution(k, eta);
      double phi = mu + delta;
      phi -= std::floor(phi);
      const double margin =
          std::pow(std::abs(momentum_overlap(phi, mu, k)), static_cast<double>(eta)) - 0.5;
      row.min_lower_margin = std::min(row.min_lower_margin, margin);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qfilt
