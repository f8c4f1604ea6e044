#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qfilt/errors.hpp"
#include "qfilt/hamiltonians.hpp"
#include "qfilt/operators.hpp"

using namespace qfilt;

namespace {

IsingParams demo_params() {
  IsingParams p;
  p.fields = {0.1, 0.35};
  p.couplings = {{0, 1, 0.55}};
  return p;
}

}  // namespace

TEST_CASE("classical energies in the {0,1} convention") {
  const IsingParams p = demo_params();
  CHECK(classical_energy(p, 2, 0b00) == doctest::Approx(0.0));
  CHECK(classical_energy(p, 2, 0b01) == doctest::Approx(0.1));   // site 0 occupied
  CHECK(classical_energy(p, 2, 0b10) == doctest::Approx(0.35));  // site 1 occupied
  CHECK(classical_energy(p, 2, 0b11) == doctest::Approx(1.0));   // 0.1 + 0.35 + 0.55
}

TEST_CASE("classical ising matrix is that diagonal") {
  const HermitianOperator h = build_classical_ising(2, demo_params());
  CHECK(h.dim() == 4);
  for (int s = 0; s < 4; ++s) {
    CHECK(h.matrix(s, s).real() ==
          doctest::Approx(classical_energy(demo_params(), 2, static_cast<std::size_t>(s))));
    for (int t = 0; t < 4; ++t)
      if (s != t) CHECK(std::abs(h.matrix(s, t)) == 0.0);
  }
}

TEST_CASE("couplings accept any site pair, not just neighbours") {
  IsingParams p;
  p.fields = {0.0, 0.0, 0.0};
  p.couplings = {{0, 2, 1.0}};
  const HermitianOperator h = build_classical_ising(3, p);
  CHECK(h.matrix(0b101, 0b101).real() == doctest::Approx(1.0));
  CHECK(h.matrix(0b011, 0b011).real() == doctest::Approx(0.0));

  IsingParams bad = p;
  bad.couplings = {{0, 3, 1.0}};
  CHECK_THROWS_AS(build_classical_ising(3, bad), ValidationError);
}

TEST_CASE("transverse field reduces to classical at gamma 0 and matches the 1-qubit formula") {
  const HermitianOperator classical = build_classical_ising(2, demo_params());
  const HermitianOperator zero_gamma = build_transverse_ising(2, demo_params(), 0.0);
  CHECK((classical.matrix - zero_gamma.matrix).norm() == 0.0);

  // One site: H = diag(0, h) + gamma X; eigenvalues h/2 -+ sqrt(h^2/4 + gamma^2).
  IsingParams single;
  single.fields = {0.8};
  const double gamma = 0.3;
  const HermitianOperator h1 = build_transverse_ising(1, single, gamma);
  const SpectralDecomposition dec = spectral_decompose(h1);
  const double mid = 0.4, rad = std::sqrt(0.16 + 0.09);
  CHECK(dec.eigenvalues[0] == doctest::Approx(mid - rad).epsilon(1e-12));
  CHECK(dec.eigenvalues[1] == doctest::Approx(mid + rad).epsilon(1e-12));
  check_hermitian(h1.matrix, 1e-12);
}

TEST_CASE("random two-local draws are hermitian and seed-deterministic") {
  const HermitianOperator a = build_random_two_local(3, 7);
  const HermitianOperator b = build_random_two_local(3, 7);
  const HermitianOperator c = build_random_two_local(3, 8);
  CHECK(a.dim() == 8);
  check_hermitian(a.matrix, 1e-12);
  CHECK((a.matrix - b.matrix).norm() == 0.0);
  CHECK((a.matrix - c.matrix).norm() > 1e-6);

  const HermitianOperator single = build_random_two_local(1, 3);
  CHECK(single.dim() == 2);
  check_hermitian(single.matrix, 1e-12);
}

TEST_CASE("spectrum normalization maps the range onto [delta, 1-delta]") {
  const HermitianOperator h = build_classical_ising(2, demo_params());
  const auto [h_norm, map] = normalize_spectrum(h, 0.125);
  const SpectralDecomposition dec = spectral_decompose(h_norm);
  CHECK(dec.eigenvalues[0] == doctest::Approx(0.125).epsilon(1e-13));
  CHECK(dec.eigenvalues[3] == doctest::Approx(0.875).epsilon(1e-13));
  // Interior points land by the same affine rule and invert exactly.
  CHECK(map.forward(0.1) == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(map.inverse(map.forward(0.35)) == doctest::Approx(0.35).epsilon(1e-12));

  // Degenerate spectrum: everything maps to exactly 1/2.
  IsingParams flat;
  flat.fields = {0.0, 0.0};
  const HermitianOperator hf = build_classical_ising(2, flat);
  const auto [hf_norm, flat_map] = normalize_spectrum(hf, 0.125);
  const SpectralDecomposition fdec = spectral_decompose(hf_norm);
  for (int i = 0; i < 4; ++i) CHECK(fdec.eigenvalues[i] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(flat_map.scale == doctest::Approx(1.0));
}

TEST_CASE("build_model dispatches on kind") {
  ModelSpec spec;
  spec.kind = "classical-ising";
  spec.qubits = 2;
  spec.ising = demo_params();
  const HermitianOperator h = build_model(spec);
  CHECK(h.matrix(3, 3).real() == doctest::Approx(1.0));

  spec.kind = "transverse-ising";
  spec.transverse = 0.7;
  CHECK(build_model(spec).matrix(0, 1) != Complex{0.0, 0.0});

  spec.kind = "random-two-local";
  spec.seed = 5;
  check_hermitian(build_model(spec).matrix, 1e-12);

  spec.kind = "nonsense";
  CHECK_THROWS_AS(build_model(spec), ValidationError);
}

TEST_CASE("field count must match the site count") {
  IsingParams p;
  p.fields = {0.1};
  CHECK_THROWS_AS(build_classical_ising(2, p), ValidationError);
}
