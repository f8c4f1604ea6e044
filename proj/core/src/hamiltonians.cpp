#include "qfilt/hamiltonians.hpp"

#include <cmath>
#include <string>

#include "qfilt/errors.hpp"
#include "qfilt/layout.hpp"
#include "qfilt/rng.hpp"

namespace qfilt {
namespace {

void check_sites(int n) {
  if (n < 1) throw ValidationError("model needs at least one site");
  if (n > kDefaultQubitCap)
    throw CapacityError("model with " + std::to_string(n) + " sites exceeds the qubit cap");
}

void check_ising(const IsingParams& params, int n) {
  if (!params.fields.empty() && static_cast<int>(params.fields.size()) != n)
    throw ValidationError("field list length must equal the site count");
  for (const auto& [i, j, value] : params.couplings) {
    if (i < 0 || j >= n || i >= j)
      throw ValidationError("coupling indices must satisfy 0 <= i < j < n");
    if (!std::isfinite(value)) throw ValidationError("coupling value must be finite");
  }
  for (double h : params.fields)
    if (!std::isfinite(h)) throw ValidationError("field value must be finite");
}

// GUE draw: real N(0,1) diagonal, (a+bi)/sqrt(2) off-diagonal.
CMatrix random_gue(int dim, RngStream& rng) {
  CMatrix m = CMatrix::Zero(dim, dim);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int r = 0; r < dim; ++r) {
    m(r, r) = Complex(rng.normal(), 0.0);
    for (int c = r + 1; c < dim; ++c) {
      m(r, c) = Complex(rng.normal(), rng.normal()) * inv_sqrt2;
      m(c, r) = std::conj(m(r, c));
    }
  }
  return m;
}

// Adds a 4x4 term acting on sites (qi, qj); local basis label is
// (bit qi) + 2 * (bit qj).
void add_two_site_term(CMatrix& h, const CMatrix& term, int qi, int qj) {
  const std::size_t dim = static_cast<std::size_t>(h.rows());
  const std::size_t bi = std::size_t{1} << qi;
  const std::size_t bj = std::size_t{1} << qj;
  for (std::size_t x = 0; x < dim; ++x) {
    if ((x & bi) || (x & bj)) continue;  // x ranges over the spectator bits
    const std::size_t idx[4] = {x, x | bi, x | bj, x | bi | bj};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        h(static_cast<Eigen::Index>(idx[a]), static_cast<Eigen::Index>(idx[b])) += term(a, b);
  }
}

}  // namespace

double classical_energy(const IsingParams& params, int n, std::size_t config) {
  check_ising(params, n);
  if (config >> n) throw ValidationError("configuration has more bits than sites");
  double e = 0.0;
  for (int i = 0; i < static_cast<int>(params.fields.size()); ++i)
    if (config >> i & 1) e += params.fields[static_cast<std::size_t>(i)];
  for (const auto& [i, j, value] : params.couplings)
    if ((config >> i & 1) && (config >> j & 1)) e += value;
  return e;
}

HermitianOperator build_classical_ising(int n, const IsingParams& params) {
  check_sites(n);
  check_ising(params, n);
  const std::size_t dim = std::size_t{1} << n;
  CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t x = 0; x < dim; ++x) {
    const auto i = static_cast<Eigen::Index>(x);
    h(i, i) = classical_energy(params, n, x);
  }
  return HermitianOperator{std::move(h), "classical-ising(n=" + std::to_string(n) + ")"};
}

HermitianOperator build_transverse_ising(int n, const IsingParams& params, double gamma) {
  HermitianOperator op = build_classical_ising(n, params);
  if (!std::isfinite(gamma)) throw ValidationError("transverse field must be finite");
  const std::size_t dim = std::size_t{1} << n;
  for (std::size_t x = 0; x < dim; ++x)
    for (int q = 0; q < n; ++q) {
      const std::size_t y = x ^ (std::size_t{1} << q);
      op.matrix(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) += gamma;
    }
  op.label = "transverse-ising(n=" + std::to_string(n) + ")";
  return op;
}

HermitianOperator build_random_two_local(int n, std::uint64_t seed) {
  check_sites(n);
  const std::size_t dim = std::size_t{1} << n;
  CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  RngStream root(seed);
  std::uint64_t pair_label = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      RngStream pair_rng = root.split(pair_label++);
      add_two_site_term(h, random_gue(4, pair_rng), i, j);
    }
  if (n == 1) {  // no pairs exist; fall back to a single-site GUE term
    RngStream site_rng = root.split(0);
    h = random_gue(2, site_rng);
  }
  return HermitianOperator{std::move(h),
                           "random-two-local(n=" + std::to_string(n) + ",seed=" +
                               std::to_string(seed) + ")"};
}

HermitianOperator build_model(const ModelSpec& spec) {
  if (spec.kind == "classical-ising") return build_classical_ising(spec.qubits, spec.ising);
  if (spec.kind == "transverse-ising")
    return build_transverse_ising(spec.qubits, spec.ising, spec.transverse);
  if (spec.kind == "random-two-local") return build_random_two_local(spec.qubits, spec.seed);
  throw ValidationError("unknown model kind: " + spec.kind);
}

std::pair<HermitianOperator, SpectrumMap> normalize_spectrum(const HermitianOperator& op,
                                                             double margin) {
  if (!(margin > 0.0 && margin < 0.5))
    throw ValidationError("normalization margin must lie in (0, 1/2)");
  const SpectralDecomposition d = spectral_decompose(op);
  const double lo = d.eigenvalues.minCoeff();
  const double hi = d.eigenvalues.maxCoeff();
  SpectrumMap map;
  if (hi - lo < 1e-12) {
    map.scale = 1.0;
    map.offset = 0.5 - lo;
  } else {
    map.scale = (1.0 - 2.0 * margin) / (hi - lo);
    map.offset = margin - map.scale * lo;
  }
  CMatrix m = map.scale * op.matrix +
              map.offset * CMatrix::Identity(op.matrix.rows(), op.matrix.cols());
  return {HermitianOperator{std::move(m), op.label + " [normalized]"}, map};
}

}  // namespace qfilt
