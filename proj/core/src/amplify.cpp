#include "qfilt/amplify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "qfilt/errors.hpp"

namespace qfilt {

namespace {
constexpr double kPi = std::numbers::pi;

double clamped_asin_sqrt(double q) {
  return std::asin(std::min(1.0, std::sqrt(std::max(0.0, q))));
}
}  // namespace

double ProjectorAction::overlap(const StateVector& state) const {
  StateVector tmp = state;
  project(tmp);
  return tmp.amp.squaredNorm();
}

void ProjectorAction::reflect(StateVector& state) const {
  StateVector tmp = state;
  project(tmp);
  state.amp -= 2.0 * tmp.amp;
}

void ProjectorAction::project_complement(StateVector& state) const {
  StateVector tmp = state;
  project(tmp);
  state.amp -= tmp.amp;
}

void ZeroTailProjector::project(StateVector& state) const {
  zero_tail_project(state, prefix_qubits_);
}

double ZeroTailProjector::overlap(const StateVector& state) const {
  return zero_tail_overlap(state, prefix_qubits_);
}

void ZeroTailProjector::reflect(StateVector& state) const {
  zero_tail_reflect(state, prefix_qubits_);
}

void ZeroTailProjector::project_complement(StateVector& state) const {
  const auto head = Eigen::Index{1} << prefix_qubits_;
  if (head > state.amp.size()) throw ValidationError("zero-tail prefix exceeds the register");
  state.amp.head(head).setZero();
}

MatrixProjector::MatrixProjector(const Projector& p) : matrix_(p.matrix) {
  check_projector(matrix_);
}

MatrixProjector::MatrixProjector(CMatrix matrix) : matrix_(std::move(matrix)) {
  check_projector(matrix_);
}

void MatrixProjector::project(StateVector& state) const {
  apply_front_matrix(state, matrix_);
}

double compute_overlap(const StateVector& state, const ProjectorAction& target) {
  return target.overlap(state);
}

double compute_overlap(const StateVector& state, const Projector& target) {
  return MatrixProjector(target).overlap(state);
}

long grover_iterations(double q) {
  if (!(q > 0.0))
    throw UndefinedAmplificationError("iteration count undefined at zero overlap");
  if (q > 1.0 + 1e-12) throw ValidationError("overlap exceeds one");
  const double theta = clamped_asin_sqrt(q);
  return std::max(0L, static_cast<long>(std::nearbyint(kPi / (4.0 * theta) - 0.5)));
}

AmplificationReport amplify(StateVector& state, const ProjectorAction& target,
                            std::size_t big_n, const AmplificationOptions& opts,
                            RngStream& rng) {
  if (big_n == 0) throw ValidationError("search space size must be positive");
  if (opts.max_retries < 0) throw ValidationError("retry budget must be non-negative");
  state.check_norm();

  AmplificationReport rep;
  const double q = target.overlap(state);
  const double n_d = static_cast<double>(big_n);
  rep.q = q;
  rep.m_hat = std::clamp(2.0 * n_d * q, 0.0, n_d);
  const double threshold = 1.0 / (n_d * n_d);
  if (q < threshold) {
    rep.aborted = true;
    return rep;
  }

  double q_plan = q;
  if (opts.overlap_noise != 0.0) {
    q_plan *= 1.0 + opts.overlap_noise * (2.0 * rng.uniform() - 1.0);
    q_plan = std::clamp(q_plan, threshold, 1.0);
  }
  const double theta_plan = clamped_asin_sqrt(q_plan);  // schedules iteration counts
  const double theta_true = clamped_asin_sqrt(q);       // actual per-round rotation

  const StateVector initial = state;  // fixed reflection axis through all retries
  int failures = 0;
  for (;;) {
    const double alpha = clamped_asin_sqrt(target.overlap(state));
    const long m = std::max(
        0L, static_cast<long>(std::nearbyint((kPi / 2.0 - alpha) / (2.0 * theta_plan))));
    for (long t = 0; t < m; ++t) {
      target.reflect(state);
      reflect_about(state, initial);
    }
    rep.iterations += m;
    rep.success_probability =
        std::pow(std::sin(alpha + 2.0 * static_cast<double>(m) * theta_true), 2);

    const double p = target.overlap(state);
    if (rng.uniform() < p) {
      target.project(state);
      state.normalize();
      rep.retries = failures;
      rep.succeeded = true;
      return rep;
    }
    ++failures;
    target.project_complement(state);
    if (state.norm() < 1e-12)
      throw NumericsError("post-measurement state vanished; overlap was numerically one");
    state.normalize();
    if (failures > opts.max_retries) {
      rep.retries = opts.max_retries;
      return rep;
    }
  }
}

namespace {

// Shared tail of the preparation pipelines once the engine exists.
PreparationResult run_filter_pipeline(const PhaseEstimation& engine,
                                      const HermitianOperator& h_norm, const SpectrumMap& map,
                                      const FilterSpec& spec, bool premises_met,
                                      std::uint64_t seed, const AmplificationOptions& opts) {
  RngStream rng(seed);
  const int n = engine.layout().system_qubits;
  RegisterLayout system_only{n, 0, 0, 0, opts.qubit_cap};
  const StateVector psi = random_state(system_only, rng);

  StateVector state = engine.filtered_state(psi.amp, spec.mu);
  const ZeroTailProjector target(n);
  const auto big_n = std::size_t{1} << n;

  PreparationResult result;
  result.spec = spec;
  result.map = map;
  result.report = amplify(state, target, big_n, opts, rng);
  result.report.premises_met = premises_met;
  if (result.report.succeeded) {
    const double e_norm = expectation_value(state, h_norm);
    result.report.output_energy_normalized = e_norm;
    result.report.output_energy = map.inverse(e_norm);
    const RVector& evs = engine.spectrum().eigenvalues;
    Eigen::Index best = 0;
    (evs.array() - e_norm).abs().minCoeff(&best);
    result.report.energy_exact_nearest = map.inverse(evs[best]);
    result.state = std::move(state);
  }
  return result;
}

// True when (k, eta) are at least as strong as the selection rules demand
// for this (eps, n, mu).
bool premises_hold(const FilterSpec& spec, int n) {
  if (!(spec.eps > 0.0 && spec.eps < 0.5)) return false;
  const double logeps = std::log2(1.0 / spec.eps);
  const int k_req = static_cast<int>(std::ceil(2.0 * logeps));
  const int eta1 = static_cast<int>(std::ceil(1.0 + (n + 1.0) / logeps));
  const int eta2 = static_cast<int>(std::ceil(1.0 + (n + std::log2(spec.mu)) / logeps));
  return spec.k >= k_req && spec.eta >= std::max({eta1, eta2, 1});
}

}  // namespace

PreparationResult prepare_filtered_state(const HermitianOperator& h, double mu, double eps,
                                         std::uint64_t seed,
                                         const AmplificationOptions& opts) {
  const Eigen::Index dim = h.dim();
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  const FilterSpec spec = select_filter_params(eps, n, mu, opts.qubit_cap);
  auto [h_norm, map] = normalize_spectrum(h, opts.margin);
  const PhaseEstimation engine(h_norm, spec.k, spec.eta, opts.qubit_cap);
  return run_filter_pipeline(engine, h_norm, map, spec, true, seed, opts);
}

PreparationResult prepare_filtered_state(const HermitianOperator& h, const FilterSpec& spec,
                                         std::uint64_t seed,
                                         const AmplificationOptions& opts) {
  if (!(spec.mu > 0.0 && spec.mu < 1.0))
    throw ValidationError("filter center must lie in (0, 1)");
  if (!(spec.eps > 0.0)) throw ValidationError("filter bandwidth must be positive");
  if (spec.k < 1 || spec.eta < 1) throw ValidationError("filter needs k >= 1 and eta >= 1");
  auto [h_norm, map] = normalize_spectrum(h, opts.margin);
  const PhaseEstimation engine(h_norm, spec.k, spec.eta, opts.qubit_cap);
  const int n = engine.layout().system_qubits;
  return run_filter_pipeline(engine, h_norm, map, spec, premises_hold(spec, n), seed, opts);
}

SweepResult sweep_mu(const HermitianOperator& h, double eps, std::uint64_t seed,
                     const AmplificationOptions& opts) {
  const Eigen::Index dim = h.dim();
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  // eta's dependence on mu is dominated by the mu-free rule across (0, 1),
  // so one reference choice fixes (k, eta) for the whole sweep.
  const FilterSpec ref = select_filter_params(eps, n, 0.5, opts.qubit_cap);
  auto [h_norm, map] = normalize_spectrum(h, opts.margin);
  const PhaseEstimation engine(h_norm, ref.k, ref.eta, opts.qubit_cap);
  const double step = filter_resolution(ref.k, ref.eta);
  const double lo = opts.margin;
  const double hi = 1.0 - opts.margin;

  SweepResult result;
  result.spec = ref;
  const RngStream root(seed);
  for (std::size_t i = 0;; ++i) {
    const double mu = lo + static_cast<double>(i) * step;
    if (mu > hi + 1e-12) break;
    const FilterSpec spec{mu, eps, ref.k, ref.eta};
    PreparationResult r = run_filter_pipeline(engine, h_norm, map, spec, true,
                                              root.split(i).key(), opts);
    if (r.report.succeeded && !result.first_success_index) {
      result.first_success_index = i;
      result.ground_energy = r.report.output_energy;
      result.ground_energy_normalized = r.report.output_energy_normalized;
    }
    result.trace.push_back(SweepEntry{mu, r.report});
  }
  return result;
}

}  // namespace qfilt
