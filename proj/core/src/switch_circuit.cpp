#include "qfilt/switch_circuit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <utility>

#include "qfilt/errors.hpp"
#include "qfilt/operators.hpp"

namespace qfilt {

namespace {

constexpr int kEnumerationCap = 25;  // 2^k amplitude tables stay desk-sized

void check_string_length(int k) {
  if (k < 1) throw ValidationError("outcome strings need at least one bit");
  if (k > kEnumerationCap)
    throw CapacityError("outcome-string length " + std::to_string(k) +
                        " exceeds the enumeration cap " + std::to_string(kEnumerationCap));
}

double check_probability(double p, const char* what) {
  if (!(p >= -1e-12 && p <= 1.0 + 1e-12))
    throw ValidationError(std::string(what) + " must lie in [0, 1]");
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

SwitchStats switch_stats(std::uint64_t j, int k) {
  check_string_length(k);
  const std::uint64_t interior = (k == 1) ? 0 : ((std::uint64_t{1} << (k - 1)) - 1);
  SwitchStats s;
  s.switches = std::popcount((j ^ (j >> 1)) & interior);
  s.zero_pairs = std::popcount(~j & ~(j >> 1) & interior);
  return s;
}

SwitchStats outcome_stats(std::uint64_t j, int k) {
  check_string_length(k);
  const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
  const std::uint64_t prev = ((j << 1) | 1) & mask;  // predecessor of each outcome
  SwitchStats s;
  s.switches = std::popcount((j ^ prev) & mask);
  s.zero_pairs = std::popcount(~j & ~prev & mask);
  return s;
}

RVector outcome_amplitudes(double p, int k) {
  check_string_length(k);
  p = check_probability(p, "acceptance probability");
  const double sp = std::sqrt(p);
  const double sq = std::sqrt(1.0 - p);
  const auto count = Eigen::Index{1} << k;
  RVector amps(count);
  for (Eigen::Index j = 0; j < count; ++j) {
    const SwitchStats st = outcome_stats(static_cast<std::uint64_t>(j), k);
    const double mag = std::pow(sp, k - st.switches) * std::pow(sq, st.switches);
    amps[j] = (st.zero_pairs % 2 == 0) ? mag : -mag;
  }
  return amps;
}

SwitchFilterState switch_filter_state(double mu, int k) {
  if (!(mu > 0.0 && mu < 1.0)) throw ValidationError("filter center must lie in (0, 1)");
  if (k % 2 == 0) throw ValidationError("switch filter needs an odd recording count");
  SwitchFilterState s;
  s.mu = mu;
  s.k = k;
  const RVector amps = outcome_amplitudes(mu, k);
  s.amplitudes = amps.cast<Complex>() / amps.norm();
  return s;
}

SwitchCircuit::SwitchCircuit(CMatrix q, CMatrix r, int system_qubits, int scratch_qubits,
                             int k, int qubit_cap)
    : layout_{system_qubits, scratch_qubits, k, 1, qubit_cap},
      q_(std::move(q)),
      r_(std::move(r)) {
  if (k % 2 == 0) throw ValidationError("recording count must be odd");
  layout_.validate();
  check_projector(q_);
  check_projector(r_);
  const auto front = static_cast<Eigen::Index>(layout_.front_dimension());
  if (q_.rows() != front || r_.rows() != front)
    throw ValidationError("projector dimensions do not match the front register");
}

void SwitchCircuit::apply_recording(StateVector& state, int t) const {
  const CMatrix& p = (t % 2 == 0) ? r_ : q_;  // R on even recordings, Q on odd
  const auto front = static_cast<Eigen::Index>(layout_.front_dimension());
  Eigen::Map<CMatrix> view(state.amp.data(), front, state.amp.size() / front);
  const auto cols = static_cast<std::size_t>(view.cols());
  const std::size_t bit = std::size_t{1} << t;
  for (std::size_t c = 0; c < cols; ++c) {
    if (c & bit) continue;
    const auto c0 = static_cast<Eigen::Index>(c);
    const auto c1 = static_cast<Eigen::Index>(c | bit);
    const CVector pd = p * (view.col(c1) - view.col(c0));
    view.col(c0) += pd;
    view.col(c1) -= pd;
  }
}

void SwitchCircuit::apply_forward(StateVector& state) const {
  if (state.amp.size() != static_cast<Eigen::Index>(layout_.dimension()))
    throw ValidationError("state does not match the recording-circuit layout");
  for (int t = 0; t < recordings(); ++t) apply_recording(state, t);
  // k recordings over a multi-million-entry vector accumulate a few 1e-13
  // of rounding drift each; the circuit is unitary, so reset it.
  state.normalize();
}

void SwitchCircuit::apply_inverse(StateVector& state) const {
  if (state.amp.size() != static_cast<Eigen::Index>(layout_.dimension()))
    throw ValidationError("state does not match the recording-circuit layout");
  for (int t = recordings() - 1; t >= 0; --t) apply_recording(state, t);
  state.normalize();
}

namespace {

void check_g_args(double& p, double& mu, int k) {
  if (k < 1 || k % 2 == 0) throw ValidationError("filter function needs odd k >= 1");
  p = check_probability(p, "acceptance probability");
  mu = check_probability(mu, "filter center");
}

}  // namespace

double g_filter(double p, double mu, int k) {
  check_g_args(p, mu, k);
  check_string_length(k);
  const RVector amp_p = outcome_amplitudes(p, k);
  const RVector amp_mu = outcome_amplitudes(mu, k);
  const std::uint64_t top = std::uint64_t{1} << (k - 1);  // final recording reads 1
  double total = 0.0;
  for (Eigen::Index j = 0; j < amp_p.size(); ++j)
    if (static_cast<std::uint64_t>(j) & top) total += amp_p[j] * amp_mu[j];
  return total;
}

double g_filter_closed(double p, double mu, int k) {
  check_g_args(p, mu, k);
  const double x = std::sqrt(p * mu);
  const double y = std::sqrt((1.0 - p) * (1.0 - mu));
  return (std::pow(x + y, k) + std::pow(x - y, k)) / 2.0;
}

double g_filter_binomial(double p, double mu, int k) {
  check_g_args(p, mu, k);
  const double x = std::sqrt(p * mu);
  const double y = std::sqrt((1.0 - p) * (1.0 - mu));
  double total = 0.0;
  for (int l = 0; 2 * l <= k; ++l) {
    double binom = 1.0;
    for (int i = 0; i < 2 * l; ++i)
      binom = binom * static_cast<double>(k - i) / static_cast<double>(i + 1);
    total += binom * std::pow(x, k - 2 * l) * std::pow(y, 2 * l);
  }
  return total;
}

double g_filter_adjacent_count(double p, double mu, int k) {
  check_g_args(p, mu, k);
  const double x = std::sqrt(p * mu);
  const double y = std::sqrt((1.0 - p) * (1.0 - mu));
  return x * std::pow(x + y, k - 1);
}

double g_filter_gaussian(double p, double mu, int k) {
  check_g_args(p, mu, k);
  if (!(mu > 0.0 && mu < 1.0))
    throw ValidationError("gaussian form needs a filter center strictly inside (0, 1)");
  const double eps2 = 2.0 * mu * (1.0 - mu) / static_cast<double>(k);
  const double d = p - mu;
  return 0.5 * std::exp(-d * d / (2.0 * eps2));
}

FilterVarianceReport measure_filter_variance(double mu, int k, int grid_points) {
  if (grid_points < 3) throw ValidationError("variance grid needs at least three points");
  double mu_checked = mu;
  double dummy = 0.5;
  check_g_args(dummy, mu_checked, k);
  FilterVarianceReport rep;
  double mass = 0.0, second = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    const double p = static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const double g = g_filter_closed(p, mu_checked, k);
    mass += g;
    second += g * (p - mu_checked) * (p - mu_checked);
  }
  rep.empirical = second / mass;
  const double base = 2.0 * mu_checked * (1.0 - mu_checked);
  rep.candidate_k2 = base / (static_cast<double>(k) * static_cast<double>(k));
  rep.candidate_k = base / static_cast<double>(k);
  rep.candidate_4k = 2.0 * base / static_cast<double>(k);
  const double d2 = std::abs(rep.empirical - rep.candidate_k2);
  const double d1 = std::abs(rep.empirical - rep.candidate_k);
  const double d4 = std::abs(rep.empirical - rep.candidate_4k);
  if (d2 <= d1 && d2 <= d4)
    rep.nearest = "2mu(1-mu)/k^2";
  else if (d1 <= d4)
    rep.nearest = "2mu(1-mu)/k";
  else
    rep.nearest = "4mu(1-mu)/k";
  return rep;
}

}  // namespace qfilt
