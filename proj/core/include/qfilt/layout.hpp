#pragma once

#include <cstddef>

namespace qfilt {

inline constexpr int kDefaultQubitCap = 22;

// Qubit bookkeeping for the composite register.
//
// Bit order within a basis-state index, least significant bit first:
//
//   [system: n] [scratchpad: h] [ancilla block 0: k] ... [ancilla block eta-1: k]
//
// so the subspace "every scratchpad and ancilla qubit is |0>" is the
// contiguous index prefix [0, 2^n), and "every ancilla qubit is |0>" is
// [0, 2^(n+h)).  Qubit i of the system register is bit i of the index.
struct RegisterLayout {
  int system_qubits = 0;   // n
  int scratch_qubits = 0;  // h
  int ancilla_blocks = 0;  // eta; 0 means no ancilla register attached
  int block_qubits = 0;    // k; ignored when ancilla_blocks == 0
  int qubit_cap = kDefaultQubitCap;

  int total_qubits() const {
    return system_qubits + scratch_qubits + ancilla_blocks * block_qubits;
  }
  std::size_t dimension() const { return std::size_t{1} << total_qubits(); }

  // Dimension of the system register alone, and of system+scratchpad.
  std::size_t system_dimension() const { return std::size_t{1} << system_qubits; }
  std::size_t front_dimension() const {
    return std::size_t{1} << (system_qubits + scratch_qubits);
  }

  // Index of the first qubit of ancilla block b.
  int block_offset(int block) const {
    return system_qubits + scratch_qubits + block * block_qubits;
  }

  // Throws ValidationError on negative counts or a zero-size block with
  // blocks attached, CapacityError when the total exceeds qubit_cap.
  void validate() const;
};

}  // namespace qfilt
