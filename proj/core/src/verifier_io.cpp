#include "qfilt/verifier_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "qfilt/errors.hpp"

namespace qfilt {

namespace {

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
  throw ValidationError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

Complex parse_complex_entry(const std::string& token, int line, int column) {
  double re = 0.0;
  double im = 0.0;
  int consumed = 0;
  const char* text = token.c_str();
  const int length = static_cast<int>(token.size());
  // "a+bi" / "a-bi": the second %lg eats the sign of the imaginary part.
  if (std::sscanf(text, "%lg%lg%n", &re, &im, &consumed) == 2 && consumed == length - 1 &&
      (token[static_cast<std::size_t>(consumed)] == 'i' ||
       token[static_cast<std::size_t>(consumed)] == 'I')) {
    return Complex{re, im};
  }
  if (std::sscanf(text, "%lg%n", &re, &consumed) == 1 && consumed == length) {
    return Complex{re, 0.0};
  }
  throw ValidationError("line " + std::to_string(line) + ", entry " + std::to_string(column) +
                        ": cannot parse complex entry '" + token + "' (expected a+bi)");
}

std::string format_complex_entry(const Complex& value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g%+.17gi", value.real(), value.imag());
  return buffer;
}

VerifierCircuit read_verifier_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open verifier file '" + path + "'");
  }

  std::string header;
  if (!std::getline(in, header)) {
    fail(path, 1, "missing header line 'dim D n N h H'");
  }
  std::istringstream head(header);
  std::string dim_tag;
  std::string n_tag;
  std::string h_tag;
  long long dim = 0;
  int witness = 0;
  int scratch = 0;
  if (!(head >> dim_tag >> dim >> n_tag >> witness >> h_tag >> scratch) || dim_tag != "dim" ||
      n_tag != "n" || h_tag != "h") {
    fail(path, 1, "malformed header '" + header + "' (expected 'dim D n N h H')");
  }
  if (witness < 1 || scratch < 0 || witness + scratch > kDefaultQubitCap) {
    fail(path, 1, "qubit counts out of range: n " + std::to_string(witness) + ", h " +
                      std::to_string(scratch));
  }
  const long long expected = 1LL << (witness + scratch);
  if (dim != expected) {
    fail(path, 1, "dim " + std::to_string(dim) + " does not equal 2^(n+h) = " +
                      std::to_string(expected));
  }

  VerifierCircuit verifier;
  verifier.witness_qubits = witness;
  verifier.scratch_qubits = scratch;
  verifier.label = path;
  verifier.v.resize(dim, dim);
  for (long long row = 0; row < dim; ++row) {
    const int line_number = static_cast<int>(row) + 2;
    std::string line;
    if (!std::getline(in, line)) {
      fail(path, line_number, "unexpected end of file: expected matrix row " +
                                  std::to_string(row + 1) + " of " + std::to_string(dim));
    }
    std::istringstream cells(line);
    std::string token;
    for (long long col = 0; col < dim; ++col) {
      if (!(cells >> token)) {
        fail(path, line_number, "row has " + std::to_string(col) + " entries, expected " +
                                    std::to_string(dim));
      }
      try {
        verifier.v(row, col) = parse_complex_entry(token, line_number, static_cast<int>(col) + 1);
      } catch (const ValidationError& error) {
        fail(path, line_number, error.what());
      }
    }
    if (cells >> token) {
      fail(path, line_number, "row has more than " + std::to_string(dim) + " entries");
    }
  }

  try {
    validate_verifier(verifier);
  } catch (const ValidationError& error) {
    throw ValidationError(path + ": " + error.what());
  }
  return verifier;
}

void write_verifier_file(const std::string& path, const VerifierCircuit& verifier) {
  validate_verifier(verifier);
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot open '" + path + "' for writing");
  }
  const Eigen::Index dim = verifier.dim();
  out << "dim " << dim << " n " << verifier.witness_qubits << " h " << verifier.scratch_qubits
      << "\n";
  for (Eigen::Index row = 0; row < dim; ++row) {
    for (Eigen::Index col = 0; col < dim; ++col) {
      if (col > 0) {
        out << ' ';
      }
      out << format_complex_entry(verifier.v(row, col));
    }
    out << "\n";
  }
  if (!out) {
    throw ValidationError("write to '" + path + "' failed");
  }
}

}  // namespace qfilt
