#pragma once

#include <string>

#include "qfilt/qma.hpp"

namespace qfilt {

// Plain-text verifier matrix format.  First line is a header
//
//   dim D n N h H
//
// with D = 2^(N+H) the matrix dimension, N the witness-qubit count and H
// the scratch-qubit count.  The next D lines each hold D whitespace-
// separated complex entries written as a real/imaginary pair glued into
// one token, "a+bi" or "a-bi" (for example "0.5+0i" or "1.5-2e-3i");
// line r, column c is the matrix entry (r, c).  A bare real token "a" is
// accepted on read and means a+0i.  The writer always emits signed pairs
// at 17 significant digits, so a write/read round trip reproduces every
// entry bit for bit.  The loaded matrix must be unitary to 1e-10.
VerifierCircuit read_verifier_file(const std::string& path);
void write_verifier_file(const std::string& path, const VerifierCircuit& verifier);

// Token-level helpers used by the file functions and their tests.
Complex parse_complex_entry(const std::string& token, int line, int column);
std::string format_complex_entry(const Complex& value);

}  // namespace qfilt
