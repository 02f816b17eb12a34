#pragma once

#include <vector>

#include "hamsim/circuit.hpp"

namespace hamsim {

// Ry(theta) = exp(-i theta Y / 2), lowered to Clifford+Rz.
void emit_ry(CircuitBlock& c, int q, double theta);
// Ry(theta) on `target` when `control` is 1: two CNOTs and two Rz.
void emit_controlled_ry(CircuitBlock& c, int control, int target, double theta);

// Uniformly controlled Ry: angle[v] applied when the controls (most
// significant first) hold v. 2^k CNOTs and 2^k rotations for k >= 1 controls.
void emit_uniform_ry(CircuitBlock& c, const std::vector<int>& controls, int target, const std::vector<double>& angles);

// Prepares sum_v amp[v] |v> from |0...0> on `qubits` (most significant first);
// amplitudes must be real, nonnegative and of size 2^|qubits|.
void emit_state_prep(CircuitBlock& c, const std::vector<int>& qubits, const std::vector<double>& amplitudes);

// Generic preparation of a real, signed amplitude vector: a multiplexed Ry and
// a multiplexed Rz per level, 2^{w+1} - 4 CNOTs for w qubits. The result is
// correct up to a global phase.
void emit_generic_state_prep(CircuitBlock& c, const std::vector<int>& qubits, const std::vector<double>& amplitudes);

// Multiplexed Rz: angle[v] applied when the controls hold v.
void emit_uniform_rz(CircuitBlock& c, const std::vector<int>& controls, int target, const std::vector<double>& angles);

// Tree angles of a nonnegative amplitude vector: level d holds 2^d angles.
std::vector<std::vector<double>> state_prep_angles(const std::vector<double>& amplitudes);

}  // namespace hamsim
