#include "qfilt/operators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "qfilt/errors.hpp"

namespace qfilt {

Projector make_projector(CMatrix m) {
  check_projector(m);
  const int rank = static_cast<int>(std::lround(m.trace().real()));
  return Projector{std::move(m), rank};
}

CMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
}

void check_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw ValidationError("operator must be square");
  const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev > tol)
    throw ValidationError("operator deviates from Hermitian by " + std::to_string(dev));
}

void check_projector(const CMatrix& p, double tol) {
  check_hermitian(p, tol);
  const double dev = (p * p - p).cwiseAbs().maxCoeff();
  if (dev > tol)
    throw ValidationError("operator deviates from idempotent by " + std::to_string(dev));
}

int projector_rank(const CMatrix& p) {
  check_projector(p);
  return static_cast<int>(std::lround(p.trace().real()));
}

void canonicalize_phases(CMatrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    auto col = vectors.col(c);
    const double peak = col.cwiseAbs().maxCoeff();
    if (peak <= 0.0) continue;
    Eigen::Index pick = 0;
    for (Eigen::Index r = 0; r < col.size(); ++r) {
      if (std::abs(col[r]) >= peak - 1e-12) {
        pick = r;
        break;
      }
    }
    const Complex z = col[pick];
    col *= std::conj(z) / std::abs(z);
    col[pick] = Complex(std::abs(col[pick]), 0.0);  // scrub the rounding residue
  }
}

SpectralDecomposition spectral_decompose(const CMatrix& h, std::size_t cap) {
  if (static_cast<std::size_t>(h.rows()) > cap)
    throw CapacityError("dense diagonalization refused: dimension " +
                        std::to_string(h.rows()) + " exceeds cap " + std::to_string(cap));
  check_hermitian(h);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw NumericsError("self-adjoint eigensolver failed to converge");
  SpectralDecomposition d{solver.eigenvalues(), solver.eigenvectors()};
  canonicalize_phases(d.eigenvectors);
  return d;
}

SpectralDecomposition spectral_decompose(const HermitianOperator& op, std::size_t cap) {
  return spectral_decompose(op.matrix, cap);
}

CMatrix random_unitary(int dim, RngStream& rng) {
  if (dim < 1) throw ValidationError("unitary dimension must be positive");
  CMatrix g(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) g(r, c) = Complex(rng.normal(), rng.normal());
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(dim, dim);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < dim; ++c) {
    const Complex rc = r(c, c);
    const double mag = std::abs(rc);
    if (mag > 0.0) q.col(c) *= rc / mag;
  }
  return q;
}

Projector random_projector(int dim, int rank, RngStream& rng) {
  if (rank < 0 || rank > dim) throw ValidationError("projector rank out of range");
  if (rank == 0) return Projector{CMatrix::Zero(dim, dim), 0};
  const CMatrix u = random_unitary(dim, rng);
  CMatrix p = u.leftCols(rank) * u.leftCols(rank).adjoint();
  p = ((p + p.adjoint()) / 2.0).eval();  // scrub the QR rounding residue
  return Projector{std::move(p), rank};
}

double expectation_value(const StateVector& state, const CMatrix& op) {
  if (op.rows() != op.cols()) throw ValidationError("expectation: operator must be square");
  const Eigen::Index fd = op.rows();
  const Eigen::Index d = state.amp.size();
  if (fd <= 0 || d % fd != 0)
    throw ValidationError("expectation: operator does not divide the state dimension");
  Eigen::Map<const CMatrix> view(state.amp.data(), fd, d / fd);
  const Complex val = (view.conjugate().cwiseProduct(op * view)).sum();
  if (std::abs(val.imag()) > 1e-10 * std::max(1.0, std::abs(val.real())))
    throw NumericsError("expectation value has a non-negligible imaginary part");
  return val.real();
}

double expectation_value(const StateVector& state, const HermitianOperator& op) {
  return expectation_value(state, op.matrix);
}

MeasurementOutcome measure_projector(StateVector& state, const CMatrix& p, RngStream& rng) {
  check_projector(p);
  double prob = expectation_value(state, p);
  if (prob < -1e-12 || prob > 1.0 + 1e-12)
    throw NumericsError("projector expectation outside [0, 1]");
  prob = std::clamp(prob, 0.0, 1.0);
  const int outcome = rng.uniform() < prob ? 1 : 0;
  const CMatrix action =
      outcome ? p : (CMatrix::Identity(p.rows(), p.cols()) - p).eval();
  apply_front_matrix(state, action);
  const double norm = state.amp.norm();
  if (norm < 1e-12) throw NumericsError("measurement collapsed onto a zero-probability branch");
  state.amp /= norm;
  return MeasurementOutcome{outcome, prob};
}

MeasurementOutcome measure_projector(StateVector& state, const Projector& p, RngStream& rng) {
  return measure_projector(state, p.matrix, rng);
}

}  // namespace qfilt
