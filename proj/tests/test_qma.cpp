#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "qfilt/errors.hpp"
#include "qfilt/jordan.hpp"
#include "qfilt/qma.hpp"
#include "qfilt/state.hpp"
#include "qfilt/switch_circuit.hpp"
#include "qfilt/verifier_io.hpp"

using namespace qfilt;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = (std::filesystem::temp_directory_path() / name).string();
  }
  ~TempFile() { std::remove(path.c_str()); }
};

void write_text(const std::string& path, const std::string& text) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  REQUIRE(f != nullptr);
  std::fputs(text.c_str(), f);
  std::fclose(f);
}

}  // namespace

TEST_CASE("verifier validation") {
  VerifierCircuit bad = identity_verifier(1, 1);
  bad.v(0, 0) = 2.0;  // not unitary
  CHECK_THROWS_AS(validate_verifier(bad), ValidationError);

  VerifierCircuit mismatch = identity_verifier(1, 1);
  mismatch.witness_qubits = 2;  // dim 4 matrix, 3 qubits claimed
  CHECK_THROWS_AS(validate_verifier(mismatch), ValidationError);

  VerifierCircuit no_gap = identity_verifier(1, 1);
  no_gap.soundness = no_gap.completeness;
  CHECK_THROWS_AS(validate_verifier(no_gap), ValidationError);

  CHECK_NOTHROW(validate_verifier(identity_verifier(2, 1)));
  CHECK_NOTHROW(validate_verifier(rotation_verifier(0.3)));
  CHECK_THROWS_AS(rotation_verifier(0.0), ValidationError);
  CHECK_THROWS_AS(rotation_verifier(1.0), ValidationError);  // >= pi/4
}

TEST_CASE("rotation verifier matrix and its Jordan acceptance probabilities") {
  const double theta = 0.3;
  const double c = std::cos(theta), s = std::sin(theta);
  const VerifierCircuit ver = rotation_verifier(theta);
  REQUIRE(ver.v.rows() == 4);

  CMatrix expect(4, 4);
  expect << c, 0, 0, -s,
            0, c, s, 0,
            0, -s, c, 0,
            s, 0, 0, c;
  CHECK((ver.v - expect.cast<Complex>()).norm() < 1e-14);

  const Projector q = scratch_projector(ver);
  const Projector r = accept_projector(ver);
  CHECK(q.rank == 2);
  CHECK(r.rank == 2);

  const JordanDecomposition d = jordan_decompose(q, r);
  REQUIRE(d.blocks.size() == 2);
  CHECK(d.blocks[0].p == doctest::Approx(s * s).epsilon(1e-12));
  CHECK(d.blocks[1].p == doctest::Approx(c * c).epsilon(1e-12));
  CHECK(d.fixed.cols() == 0);
}

TEST_CASE("accept projector measures acceptance probability") {
  const VerifierCircuit ver = rotation_verifier(0.4);
  const Projector r = accept_projector(ver);
  // A witness state |psi> (x) |0_scratch>: acceptance = <psi 0|R|psi 0>.
  StateVector s{RegisterLayout{2, 0, 0, 0, kDefaultQubitCap}, CVector::Zero(4)};
  s.amp[1] = 1.0;  // accept-bit |1>, scratch |0>
  // V|10> has accept-bit-1 weight cos^2(theta).
  CHECK(compute_overlap(s, r) == doctest::Approx(std::pow(std::cos(0.4), 2)).epsilon(1e-12));
}

TEST_CASE("recording count rule") {
  CHECK(switch_count_for(0.5, 0.25) == 9);
  CHECK(switch_count_for(0.05, 0.0875) == 13);
  CHECK(switch_count_for(0.5, 0.25) % 2 == 1);
  CHECK_THROWS_AS(switch_count_for(0.0, 0.1), ValidationError);
  CHECK_THROWS_AS(switch_count_for(0.5, 0.0), ValidationError);
}

TEST_CASE("witness preparation converges onto the in-band Jordan direction") {
  const double theta = std::asin(std::sqrt(0.05));
  const VerifierCircuit ver = rotation_verifier(theta);
  const double mu = 0.05, eps = 0.0875;

  const Projector q = scratch_projector(ver);
  const Projector r = accept_projector(ver);
  const JordanDecomposition d = jordan_decompose(q, r);
  const JordanBlock& low = d.blocks[0];  // p = sin^2(theta) = 0.05

  int successes = 0;
  for (std::uint64_t seed = 1; seed <= 12 && successes < 3; ++seed) {
    const WitnessResult res = prepare_witness(ver, mu, eps, seed);
    CHECK(res.recordings == 13);
    if (!res.report.succeeded) continue;
    ++successes;
    REQUIRE(res.state.has_value());
    const StateVector& out = *res.state;

    // All scratch and recording qubits are exactly |0> after the collapse.
    CHECK(zero_tail_overlap(out, ver.witness_qubits) == doctest::Approx(1.0).epsilon(1e-12));

    // Fidelity against the exact in-band q-image direction.
    Complex ov{0.0, 0.0};
    for (Eigen::Index i = 0; i < low.q1.size(); ++i)
      ov += std::conj(low.q1[i]) * out.amp[i];
    CHECK(std::norm(ov) >= 1.0 - 1e-6);

    // Reported acceptance probability and nearest exact eigenvalue.
    CHECK(res.report.output_energy == doctest::Approx(0.05).epsilon(1e-4));
    CHECK(res.report.energy_exact_nearest == doctest::Approx(0.05).epsilon(1e-9));
  }
  CHECK(successes == 3);
}

TEST_CASE("commuting projectors reduce to a classical filter weight") {
  // Identity verifier: Q and R commute; the fixed (Q and R) direction is
  // accept = 1, scratch = 0.  The inverse recording circuit then leaves
  // amplitude mu^{k/2} on the clean-ancilla image, so the measured overlap
  // is |<fixed|psi>|^2 mu^k.
  const VerifierCircuit ver = identity_verifier(1, 1);
  const Projector q = scratch_projector(ver);
  const Projector r = accept_projector(ver);

  const double mu = 0.7;
  const int k = 5;
  CVector psi = CVector::Zero(4);
  psi[1] = 0.6;  // accept 1, scratch 0 — the fixed direction
  psi[3] = 0.8;  // accept 1, scratch 1 — in image R, killed by Q
  const StateVector out = apply_inverse_switch_circuit(q, r, psi, mu, k);
  const double expected = 0.36 * std::pow(mu, k);
  CHECK(zero_tail_overlap(out, ver.witness_qubits) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("witness report predictions follow the plain rotation law") {
  // Scratch-free identity verifier: image(R) is the single accept-1
  // direction, so the clean-ancilla weight is exactly mu^k and the whole
  // run is deterministic up to the final measurement draw.
  const VerifierCircuit ver = identity_verifier(1, 0);
  AmplificationOptions opts;
  opts.max_retries = 0;
  const WitnessResult res = prepare_witness_with_k(ver, 0.6, 1, 3, opts);
  REQUIRE_FALSE(res.report.aborted);
  CHECK(res.report.q == doctest::Approx(0.6).epsilon(1e-12));
  const long m = grover_iterations(res.report.q);
  CHECK(res.report.iterations == m);
  const double theta = std::asin(std::sqrt(res.report.q));
  CHECK(res.report.success_probability ==
        doctest::Approx(std::pow(std::sin((2.0 * m + 1.0) * theta), 2)).epsilon(1e-6));
}

TEST_CASE("a gapped verifier probed at the gap center always aborts") {
  const double theta = std::asin(std::sqrt(0.05));
  const VerifierCircuit ver = rotation_verifier(theta);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const WitnessResult res = prepare_witness(ver, 0.5, 0.25, seed);
    CHECK(res.recordings == 9);
    CHECK(res.report.aborted);
    CHECK_FALSE(res.state.has_value());
    // Both Jordan levels are at least 4 eps from mu, so the clean-ancilla
    // weight sits far below the 1/4^m abort floor.
    CHECK(res.report.q < 1.0 / 16.0);
  }
}

TEST_CASE("verifier files round trip bit-exactly") {
  const VerifierCircuit ver = rotation_verifier(0.31);
  TempFile tmp("qfilt_verifier_roundtrip.txt");
  write_verifier_file(tmp.path, ver);
  const VerifierCircuit back = read_verifier_file(tmp.path);
  CHECK(back.witness_qubits == ver.witness_qubits);
  CHECK(back.scratch_qubits == ver.scratch_qubits);
  CHECK((back.v - ver.v).norm() == 0.0);  // %.17g survives the trip exactly
}

TEST_CASE("verifier file parse errors carry the line number") {
  auto expect_error = [](const std::string& name, const std::string& text,
                         const std::string& needle) {
    TempFile tmp(name);
    write_text(tmp.path, text);
    try {
      read_verifier_file(tmp.path);
      FAIL_CHECK("expected ValidationError for " << name);
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      CHECK(msg.find(needle) != std::string::npos);
    }
  };

  expect_error("qfilt_bad_header.txt", "dim X n 1 h 0\n", ":1:");
  expect_error("qfilt_bad_dim.txt", "dim 5 n 1 h 1\n", "2^(n+h)");
  expect_error("qfilt_short_row.txt",
               "dim 2 n 1 h 0\n1 0\n0\n", ":3:");
  expect_error("qfilt_long_row.txt",
               "dim 2 n 1 h 0\n1 0 0\n0 1\n", "more than");
  expect_error("qfilt_junk_token.txt",
               "dim 2 n 1 h 0\n1 zebra\n0 1\n", "line 2");
  expect_error("qfilt_not_unitary.txt",
               "dim 2 n 1 h 0\n1 1\n1 1\n", "unitary");
  expect_error("qfilt_truncated.txt", "dim 2 n 1 h 0\n1 0\n", "end of file");
  CHECK_THROWS_AS(read_verifier_file("/nonexistent/qfilt_missing.txt"), ValidationError);
}

#ifdef QFILT_DATA_DIR
TEST_CASE("the committed rotation verifier fixture matches its generator") {
  const std::string path = std::string(QFILT_DATA_DIR) + "/rotation_verifier.txt";
  const VerifierCircuit fixture = read_verifier_file(path);
  const VerifierCircuit generated = rotation_verifier(0.25);
  REQUIRE(fixture.v.rows() == generated.v.rows());
  CHECK(fixture.witness_qubits == generated.witness_qubits);
  CHECK(fixture.scratch_qubits == generated.scratch_qubits);
  CHECK((fixture.v - generated.v).norm() < 1e-15);
}
#endif
