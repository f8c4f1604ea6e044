#include "qfilt/jordan.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstddef>

#include "qfilt/errors.hpp"
#include "qfilt/hamiltonians.hpp"
#include "qfilt/rng.hpp"

namespace qfilt {

namespace {

constexpr double kZeroTol = 1e-8;    // p this close to 0/1 is classified as unpaired
constexpr double kBorderTol = 1e-7;  // blocks closer than this are flagged

// Orthonormal columns spanning the image of a projector.
CMatrix image_basis(const CMatrix& p) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(p);
  if (es.info() != Eigen::Success) throw NumericsError("projector eigensolve failed");
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    if (es.eigenvalues()[i] > 0.5) ++rank;
  return es.eigenvectors().rightCols(rank);  // eigenvalues ascend, image sits at the end
}

CVector canonical(CVector v) {
  CMatrix m(v.size(), 1);
  m.col(0) = v;
  canonicalize_phases(m);
  return m.col(0);
}

CMatrix from_columns(const std::vector<CVector>& cols, Eigen::Index dim) {
  CMatrix m(dim, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = cols[i];
  return m;
}

}  // namespace

JordanDecomposition jordan_decompose(const Projector& q, const Projector& r) {
  check_projector(q.matrix);
  check_projector(r.matrix);
  if (q.matrix.rows() != r.matrix.rows())
    throw ValidationError("projector dimensions differ");
  const Eigen::Index d = q.matrix.rows();

  JordanDecomposition dec;
  const CMatrix bq = image_basis(q.matrix);
  const CMatrix br = image_basis(r.matrix);
  dec.rank_q = static_cast<int>(bq.cols());
  dec.rank_r = static_cast<int>(br.cols());

  std::vector<CVector> fixed_cols, q_only_cols, r_only_cols;

  if (bq.cols() > 0) {
    Eigen::SelfAdjointEigenSolver<CMatrix> q_side(CMatrix(bq.adjoint() * r.matrix * bq));
    if (q_side.info() != Eigen::Success) throw NumericsError("compressed eigensolve failed");
    dec.qrq_spectrum = q_side.eigenvalues();
    for (Eigen::Index i = 0; i < bq.cols(); ++i) {
      const double p = std::clamp(q_side.eigenvalues()[i], 0.0, 1.0);
      const CVector q1 = canonical(bq * q_side.eigenvectors().col(i));
      if (p >= 1.0 - kZeroTol) {
        fixed_cols.push_back(q1);
      } else if (p <= kZeroTol) {
        q_only_cols.push_back(q1);
      } else {
        JordanBlock blk;
        blk.p = p;
        blk.q1 = q1;
        blk.r1 = (r.matrix * q1) / std::sqrt(p);
        blk.r0 = (q1 - std::sqrt(p) * blk.r1) / std::sqrt(1.0 - p);
        blk.q0 = std::sqrt(p) * blk.r0 - std::sqrt(1.0 - p) * blk.r1;
        blk.borderline = p <= kBorderTol || p >= 1.0 - kBorderTol;
        dec.blocks.push_back(std::move(blk));
      }
    }
  } else {
    dec.qrq_spectrum.resize(0);
  }

  if (br.cols() > 0) {
    Eigen::SelfAdjointEigenSolver<CMatrix> r_side(CMatrix(br.adjoint() * q.matrix * br));
    if (r_side.info() != Eigen::Success) throw NumericsError("compressed eigensolve failed");
    dec.rqr_spectrum = r_side.eigenvalues();
    for (Eigen::Index i = 0; i < br.cols(); ++i)
      if (r_side.eigenvalues()[i] <= kZeroTol)
        r_only_cols.push_back(canonical(br * r_side.eigenvectors().col(i)));
  } else {
    dec.rqr_spectrum.resize(0);
  }

  dec.fixed = from_columns(fixed_cols, d);
  dec.q_only = from_columns(q_only_cols, d);
  dec.r_only = from_columns(r_only_cols, d);
  return dec;
}

double block_relation_residual(const JordanBlock& block) {
  const double sp = std::sqrt(block.p);
  const double sq = std::sqrt(1.0 - block.p);
  const double res_q0 = (block.q0 - (sp * block.r0 - sq * block.r1)).norm();
  const double res_q1 = (block.q1 - (sq * block.r0 + sp * block.r1)).norm();
  const double res_r0 = (block.r0 - (sp * block.q0 + sq * block.q1)).norm();
  const double res_r1 = (block.r1 - (sp * block.q1 - sq * block.q0)).norm();
  return std::max({res_q0, res_q1, res_r0, res_r1});
}

double nonzero_spectrum_disagreement(const JordanDecomposition& decomposition) {
  std::vector<double> lhs, rhs;
  for (Eigen::Index i = 0; i < decomposition.qrq_spectrum.size(); ++i)
    if (decomposition.qrq_spectrum[i] > kZeroTol) lhs.push_back(decomposition.qrq_spectrum[i]);
  for (Eigen::Index i = 0; i < decomposition.rqr_spectrum.size(); ++i)
    if (decomposition.rqr_spectrum[i] > kZeroTol) rhs.push_back(decomposition.rqr_spectrum[i]);
  std::sort(lhs.rbegin(), lhs.rend());
  std::sort(rhs.rbegin(), rhs.rend());
  double worst = 0.0;
  const std::size_t shared = std::min(lhs.size(), rhs.size());
  for (std::size_t i = 0; i < shared; ++i) worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
  // A count mismatch means an eigenvalue fell on the wrong side of the
  // zero cut on one side only; charge it at full weight.
  for (std::size_t i = shared; i < lhs.size(); ++i) worst = std::max(worst, lhs[i]);
  for (std::size_t i = shared; i < rhs.size(); ++i) worst = std::max(worst, rhs[i]);
  return worst;
}

double naive_overlap_formula(const std::vector<double>& weights,
                             const std::vector<double>& probs) {
  if (weights.empty() || weights.size() != probs.size())
    throw ValidationError("weights and probabilities must be equal-length and non-empty");
  double wsum = 0.0, num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    const double p = probs[i];
    if (w < -1e-12) throw ValidationError("weights must be non-negative");
    if (p < -1e-10 || p > 1.0 + 1e-10)
      throw ValidationError("probabilities must lie in [0, 1]");
    wsum += w;
    num += w * p * p;
    den += w * p;
  }
  if (std::abs(wsum - 1.0) > 1e-10) throw ValidationError("weights must sum to one");
  if (den < 1e-300)
    throw UndefinedAmplificationError("residual overlap undefined: no acceptance weight");
  return num / den;
}

AcceptanceWindowProjector::AcceptanceWindowProjector(const PhaseEstimation& engine,
                                                     double cutoff)
    : engine_(engine) {
  if (engine.blocks() != 1)
    throw ValidationError("acceptance window needs a single estimation register");
  const auto labels = std::size_t{1} << engine.phase_bits();
  accepted_.resize(labels);
  for (std::size_t x = 0; x < labels; ++x)
    accepted_[x] =
        static_cast<double>(x) / static_cast<double>(labels) < cutoff + 1e-12 ? 1 : 0;
}

void AcceptanceWindowProjector::project(StateVector& state) const {
  engine_.apply_forward(state);
  const int off = engine_.layout().block_offset(0);
  const auto dim = static_cast<std::size_t>(state.amp.size());
  for (std::size_t i = 0; i < dim; ++i)
    if (!accepted_[i >> off]) state.amp[static_cast<Eigen::Index>(i)] = Complex(0.0, 0.0);
  engine_.apply_inverse(state);
}

NaiveDemoResult run_naive_demo(const HermitianOperator& h, double energy_cutoff, int k,
                               std::uint64_t seed, double margin) {
  if (!(energy_cutoff > 0.0 && energy_cutoff < 1.0))
    throw ValidationError("energy cutoff must lie in (0, 1) in normalized units");
  auto [h_norm, map] = normalize_spectrum(h, margin);
  (void)map;
  const PhaseEstimation engine(h_norm, k, 1);
  const RegisterLayout& lay = engine.layout();
  const int n = lay.system_qubits;

  RngStream rng(seed);
  RegisterLayout system_only{n, 0, 0, 0, lay.qubit_cap};
  const StateVector psi = random_state(system_only, rng);

  NaiveDemoResult res;
  const RVector& phases = engine.spectrum().eigenvalues;
  const CVector coeffs = engine.spectrum().eigenvectors.adjoint() * psi.amp;
  const AcceptanceWindowProjector target(engine, energy_cutoff);
  const auto labels = std::size_t{1} << k;
  for (Eigen::Index a = 0; a < coeffs.size(); ++a) {
    res.weights.push_back(std::norm(coeffs[a]));
    double pa = 0.0;
    for (std::size_t x = 0; x < labels; ++x)
      if (target.accepted()[x])
        pa += std::norm(momentum_overlap(
            static_cast<double>(x) / static_cast<double>(labels), phases[a], k));
    res.p_values.push_back(std::min(1.0, pa));
  }
  res.predicted = naive_overlap_formula(res.weights, res.p_values);

  StateVector state{lay, CVector::Zero(static_cast<Eigen::Index>(lay.dimension()))};
  state.amp.head(Eigen::Index{1} << n) = psi.amp;
  const StateVector initial = state;
  res.r_overlap = target.overlap(state);
  res.iterations = grover_iterations(res.r_overlap);
  for (long t = 0; t < res.iterations; ++t) {
    target.reflect(state);
    reflect_about(state, initial);
  }
  res.collapse_probability = target.overlap(state);
  target.project(state);
  if (state.norm() < 1e-12)
    throw NumericsError("acceptance projector annihilated the amplified state");
  state.normalize();
  res.residual_overlap = zero_tail_overlap(state, n);
  return res;
}

}  // namespace qfilt
